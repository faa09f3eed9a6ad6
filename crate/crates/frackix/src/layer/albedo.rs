//! Albedo decomposition of the half-space solution operator, the reflection
//! operators R and P, the null-space function Θ of (1 - PR), and the
//! macroscopic boundary operator H.

use super::{FactoredTransport, OrdinateSet, TransportOperator};
use crate::error::{Error, Result};
use crate::kinetic::ModelParams;
use crate::util::kahan_sum;
use nalgebra::DMatrix;

/// Far-field weights W over the incoming ordinates and the decaying kernel
/// G(0, v', v) over (incoming × outgoing), extracted from unit-inflow solves.
#[derive(Debug, Clone)]
pub struct AlbedoData {
    /// W(v') for v' in the incoming set.
    pub w: Vec<f64>,
    /// G(0, v', v): rows = incoming v', columns = outgoing v.
    pub g0: DMatrix<f64>,
    /// Quadrature weights restricted to the incoming set.
    pub w_in: Vec<f64>,
    /// v·ν on the incoming set.
    pub mu_in: Vec<f64>,
    /// Quadrature weights restricted to the outgoing set.
    pub w_out: Vec<f64>,
    /// v·ν on the outgoing set (negative).
    pub mu_out: Vec<f64>,
}

impl AlbedoData {
    /// Σ W w over the incoming set; 1 for a conservative layer.
    pub fn w_total(&self) -> f64 {
        kahan_sum(self.w.iter().zip(&self.w_in).map(|(w, q)| w * q))
    }

    /// Σ over incoming of G(0, ·, v) w for each outgoing v; all zero.
    pub fn g_column_totals(&self) -> Vec<f64> {
        (0..self.g0.ncols())
            .map(|b| kahan_sum((0..self.g0.nrows()).map(|a| self.g0[(a, b)] * self.w_in[a])))
            .collect()
    }
}

/// Solve one unit-inflow problem per incoming ordinate and read off the
/// far-field weights and the boundary remainder kernel.
pub fn extract_albedo(op: &TransportOperator) -> Result<AlbedoData> {
    let ords = op.ordinates();
    let n_in = ords.incoming().len();
    let n_out = ords.outgoing().len();
    let factored = FactoredTransport::new(op);
    let mut w = vec![0.0f64; n_in];
    let mut g0 = DMatrix::<f64>::zeros(n_in, n_out);
    for a in 0..n_in {
        let mut inflow = vec![0.0f64; n_in];
        inflow[a] = 1.0;
        let sol = factored.solve(&inflow, None)?;
        let quad = ords.weights()[ords.incoming()[a]];
        w[a] = sol.far_field / quad;
        for (b, &j_out) in ords.outgoing().iter().enumerate() {
            g0[(a, b)] = (sol.values[0][j_out] - sol.far_field) / quad;
        }
    }
    Ok(AlbedoData {
        w,
        g0,
        w_in: ords.incoming().iter().map(|&j| ords.weights()[j]).collect(),
        mu_in: ords.incoming().iter().map(|&j| ords.mu()[j]).collect(),
        w_out: ords.outgoing().iter().map(|&j| ords.weights()[j]).collect(),
        mu_out: ords.outgoing().iter().map(|&j| ords.mu()[j]).collect(),
    })
}

/// Reflection operator: maps an incoming density ℓ to the outgoing boundary
/// values of the layer solution,
/// (Rℓ)(v) = Σ W ℓ w + Σ G(0, ·, v) ℓ w for v·ν < 0.
pub fn reflection_r(albedo: &AlbedoData, inflow: &[f64]) -> Result<Vec<f64>> {
    if inflow.len() != albedo.w.len() {
        return Err(Error::Argument(format!(
            "reflection_r: inflow length {} vs incoming set {}",
            inflow.len(),
            albedo.w.len()
        )));
    }
    let far = kahan_sum(
        inflow
            .iter()
            .zip(&albedo.w)
            .zip(&albedo.w_in)
            .map(|((l, w), q)| l * w * q),
    );
    Ok((0..albedo.g0.ncols())
        .map(|b| {
            far + kahan_sum(
                (0..albedo.g0.nrows()).map(|a| albedo.g0[(a, b)] * inflow[a] * albedo.w_in[a]),
            )
        })
        .collect())
}

/// Prompt reflection kernel: specular by default, or an explicit nonnegative
/// matrix p[(outgoing, incoming)] normalised so that Σ_in p w_in = 1 per
/// outgoing ordinate (conservation of particles).
#[derive(Debug, Clone)]
pub enum PromptKernel {
    Specular,
    Matrix(DMatrix<f64>),
}

/// Apply P: outgoing values to incoming values,
/// (v·ν)(Pf)(v) = Σ_out |v'·ν| p(v', v) f(v') w'.
pub fn prompt_p(ords: &OrdinateSet, kernel: &PromptKernel, f_out: &[f64]) -> Result<Vec<f64>> {
    let n_in = ords.incoming().len();
    let n_out = ords.outgoing().len();
    if f_out.len() != n_out {
        return Err(Error::Argument(format!(
            "prompt_p: outgoing length {} vs outgoing set {}",
            f_out.len(),
            n_out
        )));
    }
    match kernel {
        PromptKernel::Specular => {
            // (Pf)(v) = f(mirror v): the |v'·ν| factors cancel exactly.
            let mut out = vec![0.0f64; n_in];
            for (a, &j_in) in ords.incoming().iter().enumerate() {
                let jm = ords.mirror(j_in);
                let b = ords
                    .outgoing()
                    .iter()
                    .position(|&j| j == jm)
                    .ok_or_else(|| Error::Internal("mirror not in outgoing set".into()))?;
                out[a] = f_out[b];
            }
            Ok(out)
        }
        PromptKernel::Matrix(p) => {
            if p.nrows() != n_out || p.ncols() != n_in {
                return Err(Error::Argument(
                    "prompt kernel must be outgoing × incoming".into(),
                ));
            }
            // Conservation normalisation: Σ_in p(v', v) w_in = 1 per v'.
            for b in 0..n_out {
                let s =
                    kahan_sum((0..n_in).map(|a| p[(b, a)] * ords.weights()[ords.incoming()[a]]));
                if (s - 1.0).abs() > 1e-10 {
                    return Err(Error::Validation(format!(
                        "prompt kernel row {b} integrates to {s}, not 1"
                    )));
                }
                for a in 0..n_in {
                    if p[(b, a)] < 0.0 {
                        return Err(Error::Validation(
                            "prompt kernel must be nonnegative".into(),
                        ));
                    }
                }
            }
            let mut out = vec![0.0f64; n_in];
            for (a, &j_in) in ords.incoming().iter().enumerate() {
                let mu = ords.mu()[j_in];
                let acc = kahan_sum((0..n_out).map(|b| {
                    let j_out = ords.outgoing()[b];
                    ords.mu()[j_out].abs() * p[(b, a)] * f_out[b] * ords.weights()[j_out]
                }));
                out[a] = acc / mu;
            }
            Ok(out)
        }
    }
}

/// Null-space data of (1 - PR) on the incoming set.
#[derive(Debug, Clone)]
pub struct ThetaData {
    /// Positive generator, normalised so Σ W Θ w = 1.
    pub theta: Vec<f64>,
    /// ‖(1 - PR) Θ‖₂ after normalisation.
    pub residual: f64,
    pub sigma_min: f64,
    pub sigma_second: f64,
}

/// Assemble (1 - PR) as a matrix on the incoming ordinates.
pub fn one_minus_pr(
    ords: &OrdinateSet,
    albedo: &AlbedoData,
    kernel: &PromptKernel,
) -> Result<DMatrix<f64>> {
    let n_in = albedo.w.len();
    let mut m = DMatrix::<f64>::identity(n_in, n_in);
    for ap in 0..n_in {
        let mut basis = vec![0.0f64; n_in];
        basis[ap] = 1.0;
        let r = reflection_r(albedo, &basis)?;
        let pr = prompt_p(ords, kernel, &r)?;
        for a in 0..n_in {
            m[(a, ap)] -= pr[a];
        }
    }
    Ok(m)
}

/// Smallest singular vector of (1 - PR): the function Θ > 0 with
/// (1 - PR) Θ = 0 and Σ W Θ w = 1. Fails if the null space is not
/// one-dimensional or the generator is not single-signed.
pub fn theta_nullspace(
    ords: &OrdinateSet,
    albedo: &AlbedoData,
    kernel: &PromptKernel,
) -> Result<ThetaData> {
    let m = one_minus_pr(ords, albedo, kernel)?;
    let n_in = m.nrows();
    let svd = m.clone().svd(true, true);
    let mut order: Vec<usize> = (0..n_in).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .unwrap()
    });
    let sigma_min = svd.singular_values[order[0]];
    let sigma_second = svd.singular_values[order[1]];
    if sigma_second <= 1e3 * sigma_min {
        return Err(Error::Degeneracy(format!(
            "null space of (1 - PR) is not isolated: sigma_min {sigma_min}, next {sigma_second}"
        )));
    }
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or_else(|| Error::Numerical("svd did not return singular vectors".into()))?;
    let mut theta: Vec<f64> = (0..n_in).map(|a| v_t[(order[0], a)]).collect();
    // Global sign flip toward positivity.
    let pos: f64 = theta.iter().filter(|v| **v > 0.0).map(|v| v * v).sum();
    let neg: f64 = theta.iter().filter(|v| **v < 0.0).map(|v| v * v).sum();
    if neg > pos {
        for v in theta.iter_mut() {
            *v = -*v;
        }
    }
    if theta.iter().any(|v| *v <= 0.0) {
        return Err(Error::Degeneracy(
            "null-space generator of (1 - PR) is not positive".into(),
        ));
    }
    // Normalise Σ W Θ w = 1.
    let s = kahan_sum(
        theta
            .iter()
            .zip(&albedo.w)
            .zip(&albedo.w_in)
            .map(|((t, w), q)| t * w * q),
    );
    for v in theta.iter_mut() {
        *v /= s;
    }
    let tv = nalgebra::DVector::from_column_slice(&theta);
    let residual = (&m * tv).norm();
    Ok(ThetaData {
        theta,
        residual,
        sigma_min,
        sigma_second,
    })
}

/// Matching constant a₀ = u₀ (Σ W Θ w)/(Σ W w) and the boundary layer trace
/// ℓ₀ = u₀ (Θ - 1); with the normalisations in force, a₀ = u₀ exactly.
pub fn recover_a0(u0: f64, theta: &ThetaData, albedo: &AlbedoData) -> (f64, Vec<f64>) {
    let w_theta = kahan_sum(
        theta
            .theta
            .iter()
            .zip(&albedo.w)
            .zip(&albedo.w_in)
            .map(|((t, w), q)| t * w * q),
    );
    let w_tot = albedo.w_total();
    let a0 = u0 * w_theta / w_tot;
    let l0 = theta.theta.iter().map(|t| u0 * (t - 1.0)).collect();
    (a0, l0)
}

/// Coefficients of the macroscopic boundary operator
/// H u₀ = [∫_{v·ν>0} (v·ν)(1 - P)(χ v·∇ρ - C_α v·∇^(α-1)) dv] u₀:
/// `advective` multiplies u₀ and `fractional` multiplies the normal
/// fractional derivative slot of u₀.
#[derive(Debug, Clone, Copy)]
pub struct HCoefficients {
    pub advective: f64,
    pub fractional: f64,
    /// Quadrature error estimate from the exactly known second moment.
    pub quad_error: f64,
}

pub fn boundary_operator_h(
    params: &ModelParams,
    ords: &OrdinateSet,
    kernel: &PromptKernel,
    grad_rho_wall: [f64; 2],
) -> Result<HCoefficients> {
    // q(v) per ordinate for the advective slot: χ v·∇ρ; for the fractional
    // slot the normal component v·ν stands in front of the derivative.
    let q_adv: Vec<f64> = (0..ords.len())
        .map(|j| {
            let th = ords.angle(j);
            params.chi * (th.cos() * grad_rho_wall[0] + th.sin() * grad_rho_wall[1])
        })
        .collect();
    let q_frac: Vec<f64> = (0..ords.len())
        .map(|j| -params.c_alpha * ords.mu()[j])
        .collect();

    let coef = |q: &[f64]| -> Result<f64> {
        let q_out: Vec<f64> = ords.outgoing().iter().map(|&j| q[j]).collect();
        let pq_in = prompt_p(ords, kernel, &q_out)?;
        Ok(kahan_sum(ords.incoming().iter().enumerate().map(
            |(a, &j)| ords.weights()[j] * ords.mu()[j] * (q[j] - pq_in[a]),
        )))
    };
    let advective = coef(&q_adv)?;
    let fractional = coef(&q_frac)?;
    // Midpoint quadrature of μ² over the incoming half-circle vs the exact
    // value π/2 calibrates the rule's error for these integrands.
    let mu2 = kahan_sum(
        ords.incoming()
            .iter()
            .map(|&j| ords.weights()[j] * ords.mu()[j] * ords.mu()[j]),
    );
    let quad_error = (mu2 - std::f64::consts::PI / 2.0).abs()
        * (params.chi.abs() * (grad_rho_wall[0].powi(2) + grad_rho_wall[1].powi(2)).sqrt()
            + params.c_alpha.abs())
        * 2.0;
    Ok(HCoefficients {
        advective,
        fractional,
        quad_error,
    })
}
