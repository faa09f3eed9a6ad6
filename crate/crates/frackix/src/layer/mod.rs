//! Discrete-ordinates solver for the stationary half-space transport problem
//!
//!   c0 (v·ν) ∂_r f + (1 - T)(B + C) f = g,   r in (0, ∞),
//!
//! with B = (α-1)/τ₀, C the fractional directional term
//! -τ₀^(α-2) (α-1)² Γ(1-α) (c0 v·ν ∂_r)^(α-1), inflow data on v·ν > 0 at
//! r = 0, and boundedness at infinity. The box scheme on a geometrically
//! graded grid keeps two discrete identities exact: the weighted ordinate sum
//! of (1-T)(·) vanishes, so the nodal flux moment ∫ (v·ν) f dv is constant in
//! r for g = 0, and constants solve the homogeneous problem exactly.
//!
//! The truncation at r_max closes outgoing characteristics with the running
//! far-field constant, iterated to a fixed point; the constant is the
//! flux-weighted mean of the incoming values at the last node, which makes
//! the total flux moment vanish identically at the fixed point.

mod albedo;
mod curved;

pub use albedo::{
    boundary_operator_h, extract_albedo, prompt_p, recover_a0, reflection_r, theta_nullspace,
    AlbedoData, HCoefficients, PromptKernel, ThetaData,
};
pub use curved::{boundary_flux_w1, curved_conservation_check, matching_residual};

use crate::error::{Error, Result};
use crate::kinetic::{ModelParams, TurnKernel};
use crate::special::gamma_reflection;
use crate::util::kahan_sum;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Velocity ordinates on the unit circle, split by the sign of v·ν for the
/// inner normal ν. Midpoint angles keep the set mirror-symmetric and exclude
/// grazing directions.
#[derive(Debug, Clone)]
pub struct OrdinateSet {
    mu: Vec<f64>,
    weights: Vec<f64>,
    incoming: Vec<usize>,
    outgoing: Vec<usize>,
    mirror: Vec<usize>,
}

impl OrdinateSet {
    pub fn circle(m: usize) -> Result<Self> {
        if m < 8 || m % 4 != 0 {
            return Err(Error::Config(format!(
                "ordinate count must be a multiple of 4 and at least 8, got {m}"
            )));
        }
        let w = 2.0 * PI / m as f64;
        let mut mu = Vec::with_capacity(m);
        for j in 0..m {
            let th = 2.0 * PI * (j as f64 + 0.5) / m as f64;
            mu.push(th.cos());
        }
        let incoming = (0..m).filter(|&j| mu[j] > 0.0).collect::<Vec<_>>();
        let outgoing = (0..m).filter(|&j| mu[j] < 0.0).collect::<Vec<_>>();
        // Specular mirror across the wall plane: θ ↦ π - θ.
        let mirror = (0..m)
            .map(|j| (m as i64 / 2 - 1 - j as i64).rem_euclid(m as i64) as usize)
            .collect();
        Ok(OrdinateSet {
            mu,
            weights: vec![w; m],
            incoming,
            outgoing,
            mirror,
        })
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn incoming(&self) -> &[usize] {
        &self.incoming
    }

    pub fn outgoing(&self) -> &[usize] {
        &self.outgoing
    }

    /// Ordinate index of the specular image of ordinate j.
    pub fn mirror(&self, j: usize) -> usize {
        self.mirror[j]
    }

    /// Angle of ordinate j on the circle.
    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * (j as f64 + 0.5) / self.len() as f64
    }
}

/// Radial grid on [0, r_max], geometrically graded near the wall.
#[derive(Debug, Clone)]
pub struct HalfSpaceGrid {
    nodes: Vec<f64>,
}

impl HalfSpaceGrid {
    /// Nodes 0 = r_0 < r_1 < ... < r_K = r_max with spacings growing by
    /// `ratio` from `first_spacing`.
    pub fn graded(r_max: f64, first_spacing: f64, ratio: f64) -> Result<Self> {
        if !(r_max > 0.0 && first_spacing > 0.0 && ratio >= 1.0) {
            return Err(Error::Config(format!(
                "invalid grid parameters: r_max {r_max}, first spacing {first_spacing}, ratio {ratio}"
            )));
        }
        if first_spacing > 0.01 * r_max {
            return Err(Error::Config(format!(
                "first spacing {first_spacing} exceeds 0.01 r_max = {}",
                0.01 * r_max
            )));
        }
        let mut nodes = vec![0.0f64];
        let mut h = first_spacing;
        loop {
            let last = *nodes.last().unwrap();
            if last + h >= r_max {
                nodes.push(r_max);
                break;
            }
            nodes.push(last + h);
            h *= ratio;
        }
        Ok(HalfSpaceGrid { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }
}

/// Assembled discrete half-space transport operator.
pub struct TransportOperator {
    ords: OrdinateSet,
    grid: HalfSpaceGrid,
    params: ModelParams,
    /// Row-stochastic turn matrix (T 1 = 1 exactly, column conservation
    /// exact for the circulant equal-weight layout).
    turn: DMatrix<f64>,
    /// Coefficient of the fractional term.
    frac_coef: f64,
    /// Chemotactic right-hand-side coefficients A per ordinate.
    a_coef: Vec<f64>,
    /// Full system matrix on (K+1)·M unknowns.
    matrix: DMatrix<f64>,
}

fn unknown(i: usize, j: usize, m: usize) -> usize {
    i * m + j
}

/// Deepest radius used by the far-field probes (in layer-scale units).
const PROBE_CAP: f64 = 1_000.0;
/// Fine Grünwald ladder steps kept per row before switching to exact
/// geometric tail segments.
const FINE_LADDER_STEPS: usize = 4_096;
/// Growth factor of the geometric tail segments.
const SEGMENT_RATIO: f64 = 1.2;

/// Partial sum Σ_{k=0..K} of the Grünwald weights of order β, in closed form:
/// Γ(K+1-β) / (Γ(1-β) Γ(K+1)).
fn grunwald_partial_sum(beta: f64, k: u64) -> Result<f64> {
    use crate::special::{gamma, ln_gamma};
    let kf = k as f64;
    Ok((ln_gamma(kf + 1.0 - beta)? - ln_gamma(kf + 1.0)?).exp() / gamma(1.0 - beta)?)
}

/// One-sided Grünwald derivative rows of order β on the (possibly graded)
/// node set: row i differentiates toward the wall (`toward_wall = true`,
/// used for v·ν > 0) or toward infinity, using the adjacent local spacing
/// and linear interpolation at off-node sample points.
///
/// The ladder walks FINE_LADDER_STEPS individually and then covers the rest
/// of the domain with geometric segments whose total weights are exact
/// partial-sum differences; the final remainder is closed with the boundary
/// value, so constant profiles are annihilated exactly.
fn sided_rows(nodes: &[f64], beta: f64, toward_wall: bool) -> Result<Vec<Vec<f64>>> {
    let k = nodes.len();
    let r_max = nodes[k - 1];
    let mut rows = vec![vec![0.0f64; k]; k];
    for i in 0..k {
        let h = if toward_wall {
            if i == 0 {
                nodes[1] - nodes[0]
            } else {
                nodes[i] - nodes[i - 1]
            }
        } else if i == k - 1 {
            nodes[k - 1] - nodes[k - 2]
        } else {
            nodes[i + 1] - nodes[i]
        };
        let scale = h.powf(-beta);
        let row = &mut rows[i];
        let mut used = 0.0f64;

        let sample = |row: &mut Vec<f64>, x: f64, weight: f64| {
            let pos = nodes.partition_point(|&n| n <= x);
            if pos == 0 {
                row[0] += weight;
            } else if pos >= k {
                row[k - 1] += weight;
            } else {
                let lo = pos - 1;
                let t = (x - nodes[lo]) / (nodes[pos] - nodes[lo]);
                row[lo] += weight * (1.0 - t);
                row[pos] += weight * t;
            }
        };
        let offset = |step: f64| -> f64 {
            if toward_wall {
                nodes[i] - step * h
            } else {
                nodes[i] + step * h
            }
        };
        let in_domain = |x: f64| x >= 0.0 && x <= r_max;

        // Fine ladder.
        let mut g = 1.0f64;
        let mut step = 0usize;
        let mut fine_exhausted_domain = false;
        loop {
            let x = offset(step as f64);
            if !in_domain(x) {
                fine_exhausted_domain = true;
                break;
            }
            sample(row, x, g);
            used += g;
            step += 1;
            g *= (step as f64 - 1.0 - beta) / step as f64;
            if step >= FINE_LADDER_STEPS {
                break;
            }
        }
        // Geometric tail segments with exact partial-sum weights.
        if !fine_exhausted_domain && beta < 1.0 {
            let mut k_lo = step as u64;
            loop {
                let x_lo = offset(k_lo as f64);
                if !in_domain(x_lo) {
                    break;
                }
                let k_hi_f = (k_lo as f64 * SEGMENT_RATIO).ceil();
                let k_hi = (k_hi_f as u64).max(k_lo + 1);
                let seg = grunwald_partial_sum(beta, k_hi - 1)?
                    - grunwald_partial_sum(beta, k_lo - 1)?;
                let k_mid = (k_lo as f64 * (k_hi - 1) as f64).sqrt();
                let x_mid = offset(k_mid);
                sample(row, if in_domain(x_mid) { x_mid } else { x_lo }, seg);
                used += seg;
                k_lo = k_hi;
            }
        }
        // Tail closure by constant extension beyond the boundary.
        let edge = if toward_wall { 0 } else { k - 1 };
        row[edge] -= used;
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    Ok(rows)
}

/// Wall-sided fractional derivative (order β) of a radial profile sampled on
/// the grid nodes; constants map to zero exactly.
pub(crate) fn frac_profile_derivative(
    nodes: &[f64],
    profile: &[f64],
    beta: f64,
) -> Result<Vec<f64>> {
    let rows = sided_rows(nodes, beta, true)?;
    Ok(rows
        .iter()
        .map(|row| kahan_sum(row.iter().zip(profile).map(|(w, p)| w * p)))
        .collect())
}

impl TransportOperator {
    /// Build with the model's fractional coefficient
    /// -τ₀^(α-2) (α-1)² Γ(1-α); requires α strictly inside (1,2).
    pub fn build(
        params: &ModelParams,
        kernel: &TurnKernel,
        ords: OrdinateSet,
        grid: HalfSpaceGrid,
        grad_rho_wall: [f64; 2],
    ) -> Result<Self> {
        let a = params.alpha;
        let coef =
            -params.tau0.powf(a - 2.0) * (a - 1.0) * (a - 1.0) * gamma_reflection(a)?;
        Self::build_with_frac_coef(params, kernel, ords, grid, grad_rho_wall, coef)
    }

    /// Build with an explicit fractional coefficient. `coef = 0` gives the
    /// classical scattering operator; α = 2 reduces the fractional term to
    /// first-order advection with this coefficient.
    pub fn build_with_frac_coef(
        params: &ModelParams,
        kernel: &TurnKernel,
        ords: OrdinateSet,
        grid: HalfSpaceGrid,
        grad_rho_wall: [f64; 2],
        frac_coef: f64,
    ) -> Result<Self> {
        if kernel.dimension() != 2 {
            return Err(Error::Config(
                "the half-space solver uses circle ordinates (n = 2)".into(),
            ));
        }
        let m = ords.len();
        if ords.mu.iter().any(|mu| mu.abs() < 1e-12) {
            return Err(Error::Config("grazing ordinate in the set".into()));
        }

        // Turn matrix, row-normalised so that T(1) = 1 exactly. The row sums
        // of the raw circulant kernel agree across rows (asserted), so the
        // single normalisation also preserves the weighted column sums.
        let mut turn = DMatrix::zeros(m, m);
        let mut row_sums = Vec::with_capacity(m);
        for j in 0..m {
            let mut s = 0.0;
            for jp in 0..m {
                let dth = (ords.angle(j) - ords.angle(jp)).abs();
                let v = kernel.profile(dth) * ords.weights[jp];
                turn[(j, jp)] = v;
                s += v;
            }
            row_sums.push(s);
        }
        let s0 = row_sums[0];
        if row_sums.iter().any(|s| (s - s0).abs() > 1e-10 * s0.abs()) {
            return Err(Error::Validation(
                "turn kernel row sums vary across ordinates; cannot renormalise".into(),
            ));
        }
        turn /= s0;

        let beta = params.alpha - 1.0;
        let d_wall = sided_rows(grid.nodes(), beta, true)?;
        let d_inf = sided_rows(grid.nodes(), beta, false)?;

        let nodes = grid.nodes();
        let k = grid.cells();
        let b_coef = (params.alpha - 1.0) / params.tau0;
        let dim = (k + 1) * m;
        let mut mat = DMatrix::<f64>::zeros(dim, dim);

        // Reaction operator Q at node i, ordinate j, acting on all unknowns:
        // Q = (1 - T)(B + C). Assemble cell equations as the advection plus
        // the average of Q at the two cell-end nodes.
        let add_reaction = |mat: &mut DMatrix<f64>, row: usize, i: usize, j: usize, w: f64| {
            for jp in 0..m {
                let t_factor = if j == jp { 1.0 } else { 0.0 } - turn[(j, jp)];
                if t_factor == 0.0 {
                    continue;
                }
                // B part: diagonal in r.
                mat[(row, unknown(i, jp, m))] += w * t_factor * b_coef;
                // C part: fractional derivative along r, upwinded by sign(mu).
                let mu = ords.mu[jp];
                let c_scale =
                    frac_coef * (params.c0 * mu.abs()).powf(beta);
                let d_rows = if mu > 0.0 { &d_wall } else { &d_inf };
                for (ip, dv) in d_rows[i].iter().enumerate() {
                    if *dv != 0.0 {
                        mat[(row, unknown(ip, jp, m))] += w * t_factor * c_scale * dv;
                    }
                }
            }
        };

        for i in 0..k {
            let h = nodes[i + 1] - nodes[i];
            for j in 0..m {
                let row = unknown(i, j, m);
                let adv = params.c0 * ords.mu[j] / h;
                mat[(row, unknown(i + 1, j, m))] += adv;
                mat[(row, unknown(i, j, m))] -= adv;
                add_reaction(&mut mat, row, i, j, 0.5);
                add_reaction(&mut mat, row, i + 1, j, 0.5);
            }
        }
        // Inflow rows at r = 0 for incoming ordinates.
        for (pos, &j) in ords.incoming.iter().enumerate() {
            let row = k * m + pos;
            mat[(row, unknown(0, j, m))] = 1.0;
        }
        // Closure rows at r_max: each outgoing value equals the flux-weighted
        // mean of the incoming values at the same node. The outgoing flux
        // then balances the incoming flux exactly, so the total flux moment
        // vanishes at the truncation (and with it everywhere for g = 0).
        let flux_in: f64 = ords
            .incoming
            .iter()
            .map(|&j| ords.weights[j] * ords.mu[j])
            .sum();
        for (pos, &j) in ords.outgoing.iter().enumerate() {
            let row = k * m + ords.incoming.len() + pos;
            mat[(row, unknown(k, j, m))] = 1.0;
            for &j_in in &ords.incoming {
                mat[(row, unknown(k, j_in, m))] -=
                    ords.weights[j_in] * ords.mu[j_in] / flux_in;
            }
        }

        let a_coef = ords
            .mu
            .iter()
            .enumerate()
            .map(|(j, _)| {
                let th = ords.angle(j);
                let v = [th.cos(), th.sin()];
                -params.tau1 * (params.alpha - 1.0) / (params.tau0 * params.tau0)
                    * params.c0
                    * (v[0] * grad_rho_wall[0] + v[1] * grad_rho_wall[1])
            })
            .collect();

        Ok(TransportOperator {
            ords,
            grid,
            params: *params,
            turn,
            frac_coef,
            a_coef,
            matrix: mat,
        })
    }

    pub fn ordinates(&self) -> &OrdinateSet {
        &self.ords
    }

    pub fn grid(&self) -> &HalfSpaceGrid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn frac_coef(&self) -> f64 {
        self.frac_coef
    }

    /// Row-stochastic discrete turn operator.
    pub fn turn_matrix(&self) -> &DMatrix<f64> {
        &self.turn
    }

    /// Chemotactic coefficient A per ordinate (feeds the source g).
    pub fn a_coef(&self) -> &[f64] {
        &self.a_coef
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Residual of the full interior (cell) equations applied to a given
    /// field with zero source; boundary rows are excluded.
    pub fn interior_residual(&self, f: &[f64]) -> Result<f64> {
        let m = self.ords.len();
        let k = self.grid.cells();
        if f.len() != (k + 1) * m {
            return Err(Error::Argument("field length mismatch".into()));
        }
        let v = DVector::from_column_slice(f);
        let out = &self.matrix * v;
        let mut worst = 0.0f64;
        for row in 0..k * m {
            worst = worst.max(out[row].abs());
        }
        Ok(worst)
    }
}

/// Bounded half-space solution split into a far-field constant, a modelled
/// algebraic tail A·r^(α-2), and a residual remainder.
///
/// The fractional Milne problem approaches its far field algebraically
/// (the density carries an r^(α-2) correction), so the far-field constant is
/// extracted by fitting the incoming flux means at two depths to
/// c + A r^(α-2) rather than by reading the last node.
#[derive(Debug, Clone)]
pub struct LayerSolution {
    /// f[node][ordinate].
    pub values: Vec<Vec<f64>>,
    pub far_field: f64,
    /// Amplitude of the modelled r^(α-2) tail (0 when α = 2).
    pub tail_amplitude: f64,
    /// Exponent α-2 of the modelled tail.
    pub tail_exponent: f64,
    pub closure_iterations: usize,
}

impl LayerSolution {
    /// Far field plus the modelled algebraic tail at radius r.
    pub fn tail_model(&self, r: f64) -> f64 {
        if self.tail_amplitude == 0.0 {
            self.far_field
        } else {
            self.far_field + self.tail_amplitude * r.powf(self.tail_exponent)
        }
    }

    /// Largest deviation from the modelled tail over the ordinates at the
    /// truncation node.
    pub fn remainder_at_rmax(&self, r_max: f64) -> f64 {
        let model = self.tail_model(r_max);
        self.values
            .last()
            .unwrap()
            .iter()
            .map(|v| (v - model).abs())
            .fold(0.0, f64::max)
    }

    /// Truncation adequacy: remainder beyond the modelled tail at r_max
    /// below 1e-6 of the far field.
    pub fn truncation_ok(&self, r_max: f64) -> bool {
        self.remainder_at_rmax(r_max) <= 1e-6 * self.far_field.abs().max(1e-300)
    }
}

/// LU-factored transport operator for repeated solves.
pub struct FactoredTransport<'a> {
    op: &'a TransportOperator,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    /// Exponent p of the slow density mode c + A r^p: a power profile lies in
    /// the kernel of the sided fractional balance iff
    /// Γ(p+1) Γ(-p) = Γ(p+1-β) Γ(β-p), which reduces by the reflection
    /// formula to cos(π(p - β/2)) = 0, i.e. p = (β-1)/2 = (α-2)/2.
    tail_exponent: f64,
}

impl<'a> FactoredTransport<'a> {
    pub fn new(op: &'a TransportOperator) -> Self {
        FactoredTransport {
            op,
            lu: op.matrix.clone().lu(),
            tail_exponent: 0.5 * (op.params.alpha - 2.0),
        }
    }

    /// Solve with inflow ℓ (indexed along `ordinates().incoming()`) and an
    /// optional source g given per (cell midpoint, ordinate).
    pub fn solve(&self, inflow: &[f64], source: Option<&[Vec<f64>]>) -> Result<LayerSolution> {
        self.solve_with_exponent(inflow, source, Some(self.tail_exponent))
    }

    fn solve_with_exponent(
        &self,
        inflow: &[f64],
        source: Option<&[Vec<f64>]>,
        tail_exponent: Option<f64>,
    ) -> Result<LayerSolution> {
        let op = self.op;
        let m = op.ords.len();
        let k = op.grid.cells();
        if inflow.len() != op.ords.incoming.len() {
            return Err(Error::Argument(format!(
                "inflow length {} does not match the incoming set {}",
                inflow.len(),
                op.ords.incoming.len()
            )));
        }
        if let Some(g) = source {
            if g.len() != k || g.iter().any(|row| row.len() != m) {
                return Err(Error::Argument(
                    "source must be sampled on cells × ordinates".into(),
                ));
            }
        }
        let dim = (k + 1) * m;
        let mut rhs = DVector::<f64>::zeros(dim);
        if let Some(g) = source {
            for i in 0..k {
                for j in 0..m {
                    rhs[unknown(i, j, m)] = g[i][j];
                }
            }
        }
        for (pos, _) in op.ords.incoming.iter().enumerate() {
            rhs[k * m + pos] = inflow[pos];
        }

        // The closure rows in the matrix already tie the outgoing values at
        // r_max to the incoming flux mean there, so a single solve suffices.
        let sol = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular transport matrix".into()))?;

        // Far-field extraction: the density approaches its limit like
        // c + A r^p with the slow-mode exponent p = (α-2)/2, so fit the
        // incoming flux means at two interior depths. The probes sit well
        // inside the truncation (the closure leaves a node-local defect at
        // r_max) and the fit is linear in the solution, which keeps
        // Σ W w = 1 exact.
        let nodes = op.grid.nodes();
        // Probe radii capped at fixed depths: graded grids share their
        // interior nodes, so runs with different r_max probe the same radii
        // and the extraction functional cancels exactly in comparisons.
        let r_ref = nodes[k].min(PROBE_CAP);
        let i_b = nodes
            .partition_point(|&r| r < 0.25 * r_ref)
            .min(k - 1)
            .max(2);
        let i_a = nodes
            .partition_point(|&r| r < 0.0625 * r_ref)
            .min(i_b - 1)
            .max(1);
        let flux_in: f64 = op
            .ords
            .incoming
            .iter()
            .map(|&j| op.ords.weights[j] * op.ords.mu[j])
            .sum();
        let mean_at = |i: usize| -> f64 {
            op.ords
                .incoming
                .iter()
                .map(|&j| op.ords.weights[j] * op.ords.mu[j] * sol[unknown(i, j, m)])
                .sum::<f64>()
                / flux_in
        };
        let (c_star, a_star, p_used) = match tail_exponent {
            Some(p) if op.frac_coef != 0.0 && op.params.alpha < 2.0 => {
                let m_a = mean_at(i_a);
                let m_b = mean_at(i_b);
                let s_a = nodes[i_a].powf(p);
                let s_b = nodes[i_b].powf(p);
                let amp = (m_b - m_a) / (s_b - s_a);
                (m_a - amp * s_a, amp, p)
            }
            _ => (mean_at(k), 0.0, op.params.alpha - 2.0),
        };
        let values: Vec<Vec<f64>> = (0..=k)
            .map(|i| (0..m).map(|j| sol[unknown(i, j, m)]).collect())
            .collect();
        Ok(LayerSolution {
            values,
            far_field: c_star,
            tail_amplitude: a_star,
            tail_exponent: p_used,
            closure_iterations: 1,
        })
    }
}

/// Convenience wrapper: factor and solve once.
pub fn solve_halfspace(
    op: &TransportOperator,
    inflow: &[f64],
    source: Option<&[Vec<f64>]>,
) -> Result<LayerSolution> {
    FactoredTransport::new(op).solve(inflow, source)
}

/// Flux moment ∫ (v·ν) f(r, v) dv at every node.
pub fn flux_moment(op: &TransportOperator, sol: &LayerSolution) -> Vec<f64> {
    let ords = &op.ords;
    sol.values
        .iter()
        .map(|row| {
            kahan_sum(
                (0..ords.len()).map(|j| ords.weights[j] * ords.mu[j] * row[j]),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::TurnKernel;

    pub(crate) fn test_params(alpha: f64) -> ModelParams {
        let kernel = TurnKernel::uniform(2).unwrap();
        ModelParams::derive(alpha, 1.0, 0.0, 1.0, 0.1, &kernel).unwrap()
    }

    pub(crate) fn small_operator(alpha: f64, m: usize, r_max: f64) -> TransportOperator {
        let kernel = TurnKernel::uniform(2).unwrap();
        let params = test_params(alpha);
        let ords = OrdinateSet::circle(m).unwrap();
        let grid = HalfSpaceGrid::graded(r_max, 0.02, 1.3).unwrap();
        TransportOperator::build(&params, &kernel, ords, grid, [0.0, 0.0]).unwrap()
    }

    #[test]
    fn ordinate_set_structure() {
        let o = OrdinateSet::circle(32).unwrap();
        assert_eq!(o.incoming().len(), 16);
        assert_eq!(o.outgoing().len(), 16);
        let total = kahan_sum(o.weights().iter().copied());
        assert!((total - 2.0 * PI).abs() < 1e-12);
        assert!(o.mu().iter().all(|m| m.abs() > 1e-3));
        for j in 0..32 {
            let jm = o.mirror(j);
            assert!((o.mu()[jm] + o.mu()[j]).abs() < 1e-14);
            assert_eq!(o.mirror(jm), j);
        }
        assert!(OrdinateSet::circle(30).is_err());
    }

    #[test]
    fn graded_grid_structure() {
        let g = HalfSpaceGrid::graded(100.0, 0.05, 1.2).unwrap();
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.r_max(), 100.0);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!(g.nodes()[1] <= 0.01 * g.r_max());
        assert!(HalfSpaceGrid::graded(1.0, 0.5, 1.2).is_err());
    }

    #[test]
    fn sided_rows_annihilate_constants() {
        let g = HalfSpaceGrid::graded(50.0, 0.05, 1.25).unwrap();
        for &toward_wall in &[true, false] {
            let rows = sided_rows(g.nodes(), 0.5, toward_wall).unwrap();
            for (i, row) in rows.iter().enumerate() {
                let s: f64 = kahan_sum(row.iter().copied());
                assert!(s.abs() < 1e-10, "row {i}: constant image {s}");
            }
        }
    }

    #[test]
    fn constants_solve_homogeneous_problem() {
        let op = small_operator(1.5, 16, 200.0);
        let dim = (op.grid().cells() + 1) * op.ordinates().len();
        let ones = vec![1.0; dim];
        let res = op.interior_residual(&ones).unwrap();
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn isotropic_profiles_kill_the_scattering_term() {
        // (1 - T) annihilates v-constants exactly after renormalisation.
        let op = small_operator(1.5, 16, 200.0);
        let m = op.ordinates().len();
        for j in 0..m {
            let row_sum: f64 = (0..m).map(|jp| op.turn_matrix()[(j, jp)]).sum();
            assert!((row_sum - 1.0).abs() < 1e-13);
        }
        // Weighted column sums are conserved as well (equal weights).
        for jp in 0..m {
            let col: f64 = (0..m)
                .map(|j| op.ordinates().weights()[j] * op.turn_matrix()[(j, jp)])
                .sum();
            assert!((col - op.ordinates().weights()[jp]).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_inflow_returns_constant_solution() {
        let op = small_operator(1.5, 16, 200.0);
        let inflow = vec![3.25; op.ordinates().incoming().len()];
        let sol = solve_halfspace(&op, &inflow, None).unwrap();
        assert!((sol.far_field - 3.25).abs() < 1e-9, "{}", sol.far_field);
        for row in &sol.values {
            for v in row {
                assert!((v - 3.25).abs() < 1e-8);
            }
        }
        assert!(sol.remainder_at_rmax(op.grid().r_max()) < 1e-9);
    }

    #[test]
    fn flux_moment_constant_and_zero_for_source_free() {
        let op = small_operator(1.5, 16, 400.0);
        let n_in = op.ordinates().incoming().len();
        // A deliberately rough inflow.
        let inflow: Vec<f64> = (0..n_in).map(|a| if a % 3 == 0 { 2.0 } else { 0.1 }).collect();
        let sol = solve_halfspace(&op, &inflow, None).unwrap();
        let j = flux_moment(&op, &sol);
        let spread = j.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b))
            - j.iter().fold(f64::INFINITY, |a, b| a.min(*b));
        let scale = inflow.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(spread <= 1e-8 * scale, "flux moment spread {spread}");
        // The flux-balanced closure pins the moment itself to zero.
        assert!(j[0].abs() <= 1e-8 * scale, "flux moment {}", j[0]);
    }

    #[test]
    fn alpha_continuity_of_operator_entries() {
        // Entries at α = 1.999 against the directly assembled α = 2 operator
        // with a matched fractional coefficient (the model coefficient has a
        // pole at α = 2, so continuity is a statement about the stencils).
        let kernel = TurnKernel::uniform(2).unwrap();
        let ords = OrdinateSet::circle(12).unwrap();
        let grid = HalfSpaceGrid::graded(50.0, 0.1, 1.4).unwrap();
        let p199 = test_params(1.999);
        let op199 =
            TransportOperator::build(&p199, &kernel, ords.clone(), grid.clone(), [0.0, 0.0])
                .unwrap();
        let p2 = {
            let k1 = TurnKernel::uniform(2).unwrap();
            ModelParams::derive_with_override(2.0, 1.0, 0.0, 1.0, 0.1, &k1, Some(1.0)).unwrap()
        };
        let op2 = TransportOperator::build_with_frac_coef(
            &p2,
            &kernel,
            ords,
            grid,
            [0.0, 0.0],
            op199.frac_coef(),
        )
        .unwrap();
        let a = op199.matrix();
        let b = op2.matrix();
        let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut worst = 0.0f64;
        for (x, y) in a.iter().zip(b.iter()) {
            worst = worst.max((x - y).abs());
        }
        assert!(worst / scale < 1e-2, "relative entry gap {}", worst / scale);
    }

    #[test]
    fn grazing_ordinates_rejected() {
        // m % 4 != 0 would put nodes at ±π/2; the constructor refuses them.
        assert!(OrdinateSet::circle(30).is_err());
        assert!(OrdinateSet::circle(8).is_ok());
    }
}
