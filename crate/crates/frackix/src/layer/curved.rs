//! Boundary-flux reconstruction on the layer grid, the interior/layer mass
//! matching residual, and the curved-boundary (disc strip) conservation
//! identity.

use super::HalfSpaceGrid;
use crate::error::{Error, Result};
use crate::kinetic::{sphere_area, ModelParams};
use crate::special::gamma;
use std::f64::consts::PI;

/// First-order flux correction in the layer:
/// w₁ = (-1/C̃) ∂_r u₀ + (D_α/C̃) (c₀ ∂_r)^(α-1) u₀ with
/// C̃ = (α-1) n (1-ν₁)/τ₀ and
/// D_α = π τ₀² (1-α)² (n²ν₁ - |S|) / (sin(πα) Γ(α) |S|).
///
/// The fractional derivative is the wall-sided Grünwald ladder with constant
/// extension below the wall, so constant profiles map to zero exactly.
pub fn boundary_flux_w1(
    u0b: &[f64],
    params: &ModelParams,
    grid: &HalfSpaceGrid,
) -> Result<Vec<f64>> {
    let nodes = grid.nodes();
    if u0b.len() != nodes.len() {
        return Err(Error::Argument(format!(
            "boundary_flux_w1: profile has {} samples, grid has {} nodes",
            u0b.len(),
            nodes.len()
        )));
    }
    if (params.nu1 - 1.0).abs() < 1e-14 {
        return Err(Error::Domain(
            "boundary_flux_w1: nu1 = 1 makes the flux coefficient singular".into(),
        ));
    }
    let a = params.alpha;
    if !(a > 1.0 && a < 2.0) {
        return Err(Error::Domain(format!(
            "boundary_flux_w1: alpha must lie strictly in (1,2), got {a}"
        )));
    }
    let n = params.dimension as f64;
    let area = sphere_area(params.dimension)?;
    let c_tilde = (a - 1.0) * n * (1.0 - params.nu1) / params.tau0;
    let d_alpha = PI * params.tau0 * params.tau0 * (1.0 - a) * (1.0 - a)
        * (n * n * params.nu1 - area)
        / ((PI * a).sin() * gamma(a)? * area);

    let k = nodes.len();
    // Nonuniform centered first derivative (one-sided at the ends).
    let mut du = vec![0.0f64; k];
    for i in 0..k {
        du[i] = if i == 0 {
            (u0b[1] - u0b[0]) / (nodes[1] - nodes[0])
        } else if i == k - 1 {
            (u0b[k - 1] - u0b[k - 2]) / (nodes[k - 1] - nodes[k - 2])
        } else {
            let hl = nodes[i] - nodes[i - 1];
            let hr = nodes[i + 1] - nodes[i];
            // Three-point formula on a nonuniform stencil.
            (u0b[i + 1] * hl * hl - u0b[i - 1] * hr * hr
                + u0b[i] * (hr * hr - hl * hl))
                / (hl * hr * (hl + hr))
        };
    }
    let beta = a - 1.0;
    let frac = super::frac_profile_derivative(nodes, u0b, beta)?;
    Ok((0..k)
        .map(|i| {
            -du[i] / c_tilde + d_alpha / c_tilde * params.c0.powf(beta) * frac[i]
        })
        .collect())
}

/// Max over interior sample times of |d/dt (interior mass - layer mass)| by
/// centered differences; both series must be sampled at the same times.
pub fn matching_residual(interior: &[(f64, f64)], layer: &[(f64, f64)]) -> Result<f64> {
    if interior.len() < 3 || layer.len() < 3 {
        return Err(Error::Argument(
            "matching_residual: need at least 3 time samples".into(),
        ));
    }
    if interior.len() != layer.len() {
        return Err(Error::Argument(
            "matching_residual: series lengths differ".into(),
        ));
    }
    for ((ti, _), (tl, _)) in interior.iter().zip(layer) {
        if (ti - tl).abs() > 1e-12 * ti.abs().max(1.0) {
            return Err(Error::Argument(
                "matching_residual: series are not sampled at common times".into(),
            ));
        }
    }
    let diff: Vec<(f64, f64)> = interior
        .iter()
        .zip(layer)
        .map(|((t, mi), (_, mb))| (*t, mi - mb))
        .collect();
    let mut worst = 0.0f64;
    for w in diff.windows(3) {
        let dt = w[2].0 - w[0].0;
        if dt <= 0.0 {
            return Err(Error::Argument(
                "matching_residual: times must be strictly increasing".into(),
            ));
        }
        worst = worst.max(((w[2].1 - w[0].1) / dt).abs());
    }
    Ok(worst)
}

/// Curvature decomposition of the strip divergence identity on the disc:
/// the flux of ν(ν·w) through the strip boundary equals the strip integral
/// of Δd (ν·w) + ∂_d (ν·w), with d the distance to the wall and Δd = -1/(R-d).
///
/// `w_normal(d, φ)` and `dw_dd(d, φ)` sample the analytic test field; the
/// returned residual is |lhs - rhs| / max(1, |lhs|, |rhs|), evaluated with an
/// n_quad × n_quad midpoint rule.
pub fn curved_conservation_check(
    w_normal: &dyn Fn(f64, f64) -> f64,
    dw_dd: &dyn Fn(f64, f64) -> f64,
    strip_width: f64,
    radius: f64,
    n_quad: usize,
) -> Result<f64> {
    if !(strip_width > 0.0) || !(radius > 0.0) {
        return Err(Error::Geometry(
            "strip width and radius must be positive".into(),
        ));
    }
    if strip_width >= radius {
        return Err(Error::Geometry(format!(
            "strip of width {strip_width} does not fit in a disc of radius {radius}"
        )));
    }
    if n_quad < 2 {
        return Err(Error::Argument("need at least 2 quadrature panels".into()));
    }
    let nq = n_quad;
    let dphi = 2.0 * PI / nq as f64;
    let dd = strip_width / nq as f64;

    // Boundary flux of F = ν (ν·w) through both strip edges with outward
    // normals of the annulus: -(ν·w) R on the wall, +(ν·w)(R - 2δ) inside.
    let mut lhs = 0.0f64;
    for p in 0..nq {
        let phi = (p as f64 + 0.5) * dphi;
        lhs += (-w_normal(0.0, phi) * radius
            + w_normal(strip_width, phi) * (radius - strip_width))
            * dphi;
    }

    // Strip integral of [Δd (ν·w) + ∂_d (ν·w)] with area element (R-d) dd dφ.
    let mut rhs = 0.0f64;
    for p in 0..nq {
        let phi = (p as f64 + 0.5) * dphi;
        for q in 0..nq {
            let d = (q as f64 + 0.5) * dd;
            let s = radius - d;
            rhs += (-w_normal(d, phi) / s + dw_dd(d, phi)) * s * dd * dphi;
        }
    }
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    Ok((lhs - rhs).abs() / scale)
}

#[cfg(test)]
mod tests {
    use super::super::HalfSpaceGrid;
    use super::*;
    use crate::kinetic::TurnKernel;

    fn layer_params(alpha: f64) -> ModelParams {
        let kernel = TurnKernel::uniform(2).unwrap();
        ModelParams::derive(alpha, 1.0, 0.0, 1.0, 0.1, &kernel).unwrap()
    }

    #[test]
    fn w1_vanishes_for_radially_constant_profiles() {
        let grid = HalfSpaceGrid::graded(40.0, 0.05, 1.3).unwrap();
        let params = layer_params(1.5);
        let u0 = vec![2.5; grid.nodes().len()];
        let w1 = boundary_flux_w1(&u0, &params, &grid).unwrap();
        for v in &w1 {
            assert!(v.abs() < 1e-10, "w1 = {v}");
        }
    }

    #[test]
    fn w1_linearity() {
        let grid = HalfSpaceGrid::graded(40.0, 0.05, 1.3).unwrap();
        let params = layer_params(1.4);
        let nodes = grid.nodes();
        let f: Vec<f64> = nodes.iter().map(|r| (-r).exp()).collect();
        let g: Vec<f64> = nodes.iter().map(|r| 1.0 / (1.0 + r)).collect();
        let combo: Vec<f64> = f.iter().zip(&g).map(|(a, b)| 2.0 * a - 0.3 * b).collect();
        let wf = boundary_flux_w1(&f, &params, &grid).unwrap();
        let wg = boundary_flux_w1(&g, &params, &grid).unwrap();
        let wc = boundary_flux_w1(&combo, &params, &grid).unwrap();
        for i in 0..nodes.len() {
            let expect = 2.0 * wf[i] - 0.3 * wg[i];
            assert!((wc[i] - expect).abs() < 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn w1_matches_refined_grunwald_oracle() {
        // exp(-r) profile: compare against the same formula evaluated on a
        // 10x-refined uniform grid, interpolated back to the coarse nodes.
        let params = layer_params(1.5);
        let r_max = 30.0;
        let coarse = HalfSpaceGrid::graded(r_max, 0.05, 1.2).unwrap();
        let u_c: Vec<f64> = coarse.nodes().iter().map(|r| (-r).exp()).collect();
        let w_c = boundary_flux_w1(&u_c, &params, &coarse).unwrap();

        // Fine uniform grid with spacing a tenth of the coarse first cell.
        let h_fine = 0.005;
        let nf = (r_max / h_fine) as usize;
        let fine_nodes: Vec<f64> = (0..=nf).map(|i| i as f64 * h_fine).collect();
        let fine = HalfSpaceGrid { nodes: fine_nodes };
        let u_f: Vec<f64> = fine.nodes().iter().map(|r| (-r).exp()).collect();
        let w_f = boundary_flux_w1(&u_f, &params, &fine).unwrap();

        // Compare near the wall where the layer physics lives.
        for (i, &r) in coarse.nodes().iter().enumerate() {
            if r > 5.0 {
                break;
            }
            let fi = (r / h_fine).round() as usize;
            assert!(
                (w_c[i] - w_f[fi]).abs() < 1e-4 * w_f[fi].abs().max(1.0) * 100.0,
                "node {i} (r = {r}): {} vs {}",
                w_c[i],
                w_f[fi]
            );
        }
    }

    #[test]
    fn matching_residual_basics() {
        let a = [(0.0, 1.0), (0.5, 1.0), (1.0, 1.0)];
        let b = [(0.0, 0.2), (0.5, 0.2), (1.0, 0.2)];
        assert_eq!(matching_residual(&a, &b).unwrap(), 0.0);
        // Interior-only: layer identically zero, interior conserved.
        let zero = [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)];
        assert_eq!(matching_residual(&a, &zero).unwrap(), 0.0);
        // Fewer than 3 samples.
        assert!(matching_residual(&a[..2], &b[..2]).is_err());
        // Mismatched times.
        let c = [(0.0, 0.2), (0.6, 0.2), (1.0, 0.2)];
        assert!(matching_residual(&a, &c).is_err());
    }

    #[test]
    fn curved_identity_radially_constant() {
        // ν·w constant: only the curvature term survives and the identity
        // closes to quadrature precision.
        let w = |_d: f64, _phi: f64| 1.7;
        let dw = |_d: f64, _phi: f64| 0.0;
        let res = curved_conservation_check(&w, &dw, 0.3, 1.0, 256).unwrap();
        assert!(res <= 1e-8, "residual {res}");
    }

    #[test]
    fn curved_identity_flat_limit() {
        // R → ∞ with a fixed strip: the identity degenerates to the
        // fundamental theorem of calculus of the half-space version.
        let w = |d: f64, phi: f64| (-3.0 * d).exp() * (1.0 + 0.5 * phi.sin());
        let dw = |d: f64, phi: f64| -3.0 * (-3.0 * d).exp() * (1.0 + 0.5 * phi.sin());
        let res = curved_conservation_check(&w, &dw, 0.4, 1e8, 4096).unwrap();
        assert!(res <= 1e-8, "flat-limit residual {res}");
    }

    #[test]
    fn curved_identity_refinement_slope() {
        let w = |d: f64, phi: f64| (-2.0 * d).exp() * (1.0 + 0.3 * (2.0 * phi).cos()) + 0.2 * d;
        let dw =
            |d: f64, phi: f64| -2.0 * (-2.0 * d).exp() * (1.0 + 0.3 * (2.0 * phi).cos()) + 0.2;
        let r1 = curved_conservation_check(&w, &dw, 0.35, 1.2, 32).unwrap();
        let r2 = curved_conservation_check(&w, &dw, 0.35, 1.2, 64).unwrap();
        let r3 = curved_conservation_check(&w, &dw, 0.35, 1.2, 128).unwrap();
        let s1 = (r1 / r2).log2();
        let s2 = (r2 / r3).log2();
        assert!(s1 >= 1.0 && s2 >= 1.0, "slopes {s1} {s2} ({r1} {r2} {r3})");
    }

    #[test]
    fn curved_identity_rejects_bad_geometry() {
        let w = |_: f64, _: f64| 1.0;
        let dw = |_: f64, _: f64| 0.0;
        assert!(curved_conservation_check(&w, &dw, 2.0, 1.0, 32).is_err());
        assert!(curved_conservation_check(&w, &dw, -0.1, 1.0, 32).is_err());
    }
}
