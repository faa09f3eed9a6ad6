//! Kinetic primitives: turn-angle kernels, sphere quadrature, the eigenvalue
//! ν₁ of the turn operator, run-time and direction sampling, specular
//! reflection, scaling exponents and the macroscopic constants (C_α, χ).

use crate::error::{Error, Result};
use crate::special::gamma;
use crate::util::{angle_between, dot2, kahan_sum, norm2};
use rand::Rng;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Default node count for simulation-grade circle quadrature.
pub const DEFAULT_QUAD_NODES: usize = 64;
/// Node count used when computing ν₁ and the constants derived from it.
pub const NU1_QUAD_NODES: usize = 4096;
/// Iteration cap for rejection sampling of new directions.
const MAX_REJECTION_ITERS: usize = 1_000_000;

/// Surface area of the unit sphere in dimension `n`:
/// 2 for n = 1, otherwise 2 π^(n/2) / Γ(n/2).
pub fn sphere_area(n: usize) -> Result<f64> {
    match n {
        0 => Err(Error::Domain("sphere_area: dimension must be >= 1".into())),
        1 => Ok(2.0),
        _ => Ok(2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)?),
    }
}

// ---------------------------------------------------------------------------
// Turn-angle kernel
// ---------------------------------------------------------------------------

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum KernelKind {
    Uniform,
    Cosine,
    VonMises { kappa: f64, norm: f64 },
    Custom(ProfileFn),
}

/// Reorientation distribution ℓ as a function of the angular separation
/// θ ∈ [0, π] between the old and the new direction.
#[derive(Clone)]
pub struct TurnKernel {
    dimension: usize,
    kind: KernelKind,
    profile_max: f64,
}

impl fmt::Debug for TurnKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            KernelKind::Uniform => "uniform",
            KernelKind::Cosine => "cosine",
            KernelKind::VonMises { .. } => "vonmises",
            KernelKind::Custom(_) => "custom",
        };
        write!(f, "TurnKernel({name}, n={})", self.dimension)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 1 || n == 2 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "turn kernels are only provided for n in {{1,2}}, got {n}"
        )))
    }
}

impl TurnKernel {
    /// Isotropic kernel 1/|S|.
    pub fn uniform(dimension: usize) -> Result<Self> {
        check_dim(dimension)?;
        Ok(Self::finish(dimension, KernelKind::Uniform))
    }

    /// Forward-biased kernel (1 + cos θ)/|S|.
    pub fn cosine(dimension: usize) -> Result<Self> {
        check_dim(dimension)?;
        Ok(Self::finish(dimension, KernelKind::Cosine))
    }

    /// Concentrated kernel ∝ exp(κ cos θ), normalised numerically.
    pub fn von_mises(dimension: usize, kappa: f64) -> Result<Self> {
        check_dim(dimension)?;
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::Config(format!(
                "vonmises kernel needs kappa >= 0, got {kappa}"
            )));
        }
        let norm = match dimension {
            1 => kappa.exp() + (-kappa).exp(),
            _ => {
                // ∫_0^{2π} exp(κ cos θ) dθ by midpoint rule (spectrally exact).
                let m = 8192;
                kahan_sum((0..m).map(|j| {
                    let th = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    (kappa * th.cos()).exp() * (2.0 * PI / m as f64)
                }))
            }
        };
        Ok(Self::finish(dimension, KernelKind::VonMises { kappa, norm }))
    }

    /// Arbitrary nonnegative profile; the caller is responsible for
    /// normalisation (checked downstream by `kernel_normalization`).
    pub fn custom(dimension: usize, profile: ProfileFn) -> Result<Self> {
        check_dim(dimension)?;
        Ok(Self::finish(dimension, KernelKind::Custom(profile)))
    }

    fn finish(dimension: usize, kind: KernelKind) -> Self {
        let mut k = TurnKernel {
            dimension,
            kind,
            profile_max: 0.0,
        };
        let scan = 8192;
        let mut max = 0.0f64;
        for i in 0..=scan {
            let th = PI * i as f64 / scan as f64;
            max = max.max(k.profile(th));
        }
        k.profile_max = max;
        k
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Density value at angular separation `theta` (radians, folded into [0, π]).
    pub fn profile(&self, theta: f64) -> f64 {
        let th = theta.abs();
        let th = if th > PI { 2.0 * PI - th } else { th };
        match &self.kind {
            KernelKind::Uniform => match self.dimension {
                1 => 0.5,
                _ => 1.0 / (2.0 * PI),
            },
            KernelKind::Cosine => match self.dimension {
                1 => (1.0 + th.cos()) / 2.0,
                _ => (1.0 + th.cos()) / (2.0 * PI),
            },
            KernelKind::VonMises { kappa, norm } => (kappa * th.cos()).exp() / norm,
            KernelKind::Custom(f) => f(th),
        }
    }
}

// ---------------------------------------------------------------------------
// Sphere quadrature
// ---------------------------------------------------------------------------

/// Quadrature nodes and weights on the unit sphere S in dimension n.
///
/// n = 2 uses M equally spaced midpoint angles with equal weights 2π/M;
/// n = 1 is the two-point set {±1} with unit weights.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    dimension: usize,
    nodes: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn new(dimension: usize, m: usize) -> Result<Self> {
        match dimension {
            1 => Ok(SphereQuadrature {
                dimension,
                nodes: vec![[1.0, 0.0], [-1.0, 0.0]],
                weights: vec![1.0, 1.0],
            }),
            2 => {
                if m < 4 {
                    return Err(Error::Config(format!(
                        "circle quadrature needs at least 4 nodes, got {m}"
                    )));
                }
                let w = 2.0 * PI / m as f64;
                let mut nodes = Vec::with_capacity(m);
                for j in 0..m {
                    let th = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    nodes.push([th.cos(), th.sin()]);
                }
                Ok(SphereQuadrature {
                    dimension,
                    nodes,
                    weights: vec![w; m],
                })
            }
            n => Err(Error::Config(format!(
                "quadrature only provided for n in {{1,2}}, got {n}"
            ))),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫_S f(v) dv by the quadrature rule.
    pub fn integrate(&self, mut f: impl FnMut([f64; 2]) -> f64) -> f64 {
        kahan_sum(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(v, w)| w * f(*v)),
        )
    }
}

/// ∫_S ℓ(|v - e₁|) dv by quadrature; 1 for a normalised kernel.
pub fn kernel_normalization(kernel: &TurnKernel, quad: &SphereQuadrature) -> Result<f64> {
    if kernel.dimension() != quad.dimension() {
        return Err(Error::Config(format!(
            "kernel dimension {} does not match quadrature dimension {}",
            kernel.dimension(),
            quad.dimension()
        )));
    }
    let e1 = [1.0, 0.0];
    Ok(quad.integrate(|v| kernel.profile(angle_between(v, e1))))
}

/// Second eigenvalue of the turn operator,
/// ν₁ = ∫_S ℓ(|u - e₁|) u₁ du; strictly below 1 for valid kernels.
pub fn eigenvalue_nu1(kernel: &TurnKernel, quad: &SphereQuadrature) -> Result<f64> {
    let norm = kernel_normalization(kernel, quad)?;
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Validation(format!(
            "kernel is not normalised: integral = {norm}"
        )));
    }
    let e1 = [1.0, 0.0];
    Ok(quad.integrate(|u| kernel.profile(angle_between(u, e1)) * u[0]))
}

// ---------------------------------------------------------------------------
// Scaling exponents and macroscopic constants
// ---------------------------------------------------------------------------

/// Anomalous scaling exponents (μ, ϱ) for 1 < α ≤ 2 and γ = 1/2.
///
/// ϱ = 1/(α-1) and μ = (ϱ-1)/2; the latter evaluates μ = (2-α)/(2(α-1))
/// through exact float operations, so ϱ - 2μ = 1 holds bit-exactly.
pub fn scaling_exponents(alpha: f64, gamma_exp: f64) -> Result<(f64, f64)> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::Domain(format!(
            "scaling_exponents: alpha must lie in (1,2], got {alpha}"
        )));
    }
    if gamma_exp != 0.5 {
        return Err(Error::Domain(format!(
            "scaling_exponents: gamma is fixed to 1/2, got {gamma_exp}"
        )));
    }
    let varrho = 1.0 / (alpha - 1.0);
    let mu = (varrho - 1.0) / 2.0;
    Ok((mu, varrho))
}

/// Macroscopic constants of the limit equation:
/// C_α = -π (τ₀ c₀)^(α-1) (α-1) / (sin(πα) Γ(α)) · (n²ν₁ - |S|) / (n |S| (ν₁ - 1)),
/// χ = τ₁ c₀ / (n τ₀).
pub fn macro_constants(
    alpha: f64,
    tau0: f64,
    tau1: f64,
    c0: f64,
    nu1: f64,
    n: usize,
) -> Result<(f64, f64)> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!(
            "macro_constants: alpha must lie strictly in (1,2), got {alpha}"
        )));
    }
    if nu1 >= 1.0 {
        return Err(Error::Validation(format!(
            "macro_constants: nu1 must be < 1, got {nu1}"
        )));
    }
    let nf = n as f64;
    let area = sphere_area(n)?;
    let front = -PI * (tau0 * c0).powf(alpha - 1.0) * (alpha - 1.0)
        / ((PI * alpha).sin() * gamma(alpha)?);
    let ratio = (nf * nf * nu1 - area) / (nf * area * (nu1 - 1.0));
    let chi = tau1 * c0 / (nf * tau0);
    Ok((front * ratio, chi))
}

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

/// Physical and derived parameters of the model.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    pub alpha: f64,
    pub tau0: f64,
    pub tau1: f64,
    pub c0: f64,
    /// Fixed to 1/2 throughout.
    pub gamma_exp: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub varrho: f64,
    pub nu1: f64,
    /// Fractional diffusivity of the macroscopic equation. Derived from the
    /// kernel for α < 2; must be supplied explicitly at α = 2.
    pub c_alpha: f64,
    pub chi: f64,
    pub dimension: usize,
}

impl ModelParams {
    /// Derive the full parameter set from the basic inputs and a kernel.
    /// ν₁ is computed on a 4096-node quadrature.
    pub fn derive(
        alpha: f64,
        tau0: f64,
        tau1: f64,
        c0: f64,
        epsilon: f64,
        kernel: &TurnKernel,
    ) -> Result<Self> {
        Self::derive_with_override(alpha, tau0, tau1, c0, epsilon, kernel, None)
    }

    /// Same as [`ModelParams::derive`], with an explicit C_α override.
    /// The override is mandatory at α = 2 where the derived formula has a pole.
    pub fn derive_with_override(
        alpha: f64,
        tau0: f64,
        tau1: f64,
        c0: f64,
        epsilon: f64,
        kernel: &TurnKernel,
        c_alpha_override: Option<f64>,
    ) -> Result<Self> {
        if !(tau0 > 0.0) {
            return Err(Error::Validation(format!("tau0 must be > 0, got {tau0}")));
        }
        if !(c0 > 0.0) {
            return Err(Error::Validation(format!("c0 must be > 0, got {c0}")));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Validation(format!(
                "epsilon must lie in (0,1], got {epsilon}"
            )));
        }
        let n = kernel.dimension();
        let quad = SphereQuadrature::new(n, NU1_QUAD_NODES)?;
        let nu1 = eigenvalue_nu1(kernel, &quad)?;
        if nu1 >= 1.0 {
            return Err(Error::Validation(format!(
                "kernel eigenvalue nu1 = {nu1} must be < 1"
            )));
        }
        let (mu, varrho) = scaling_exponents(alpha, 0.5)?;
        let (c_alpha, chi) = if alpha < 2.0 {
            let (ca, chi) = macro_constants(alpha, tau0, tau1, c0, nu1, n)?;
            (c_alpha_override.unwrap_or(ca), chi)
        } else {
            let ca = c_alpha_override.ok_or_else(|| {
                Error::Validation(
                    "alpha = 2 has no derived C_alpha; supply c_alpha explicitly".into(),
                )
            })?;
            (ca, tau1 * c0 / (n as f64 * tau0))
        };
        Ok(ModelParams {
            alpha,
            tau0,
            tau1,
            c0,
            gamma_exp: 0.5,
            epsilon,
            mu,
            varrho,
            nu1,
            c_alpha,
            chi,
            dimension: n,
        })
    }
}

// ---------------------------------------------------------------------------
// Chemical field
// ---------------------------------------------------------------------------

type FieldFn = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;

/// Static chemical concentration ρ with its exact gradient, both closed-form.
#[derive(Clone)]
pub struct ChemicalField {
    rho: FieldFn,
    grad: GradFn,
}

impl fmt::Debug for ChemicalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChemicalField(analytic)")
    }
}

impl ChemicalField {
    pub fn new(rho: FieldFn, grad: GradFn) -> Self {
        ChemicalField { rho, grad }
    }

    pub fn constant(level: f64) -> Self {
        ChemicalField {
            rho: Arc::new(move |_| level),
            grad: Arc::new(|_| [0.0, 0.0]),
        }
    }

    pub fn linear(slope: [f64; 2]) -> Self {
        ChemicalField {
            rho: Arc::new(move |x| slope[0] * x[0] + slope[1] * x[1]),
            grad: Arc::new(move |_| slope),
        }
    }

    /// ρ(x) = A exp(-|x - c|² / (2 σ²)).
    pub fn gaussian(amplitude: f64, center: [f64; 2], width: f64) -> Self {
        let s2 = width * width;
        ChemicalField {
            rho: Arc::new(move |x| {
                let dx = [x[0] - center[0], x[1] - center[1]];
                amplitude * (-dot2(dx, dx) / (2.0 * s2)).exp()
            }),
            grad: Arc::new(move |x| {
                let dx = [x[0] - center[0], x[1] - center[1]];
                let v = amplitude * (-dot2(dx, dx) / (2.0 * s2)).exp() / s2;
                [-dx[0] * v, -dx[1] * v]
            }),
        }
    }

    pub fn rho(&self, x: [f64; 2]) -> f64 {
        (self.rho)(x)
    }

    pub fn grad_rho(&self, x: [f64; 2]) -> [f64; 2] {
        (self.grad)(x)
    }
}

// ---------------------------------------------------------------------------
// Sampling and reflection
// ---------------------------------------------------------------------------

/// Inverse-transform sample of the Lomax (Pareto II) run-time law with
/// survival (b/(b+τ))^α: τ = b (U^(-1/α) - 1) with U in (0,1].
pub fn sample_run_time(rng: &mut impl Rng, alpha: f64, b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Internal(format!(
            "sample_run_time: scale b must be > 0 (clamp upstream), got {b}"
        )));
    }
    let u: f64 = rng.sample(rand::distributions::OpenClosed01);
    Ok(b * (u.powf(-1.0 / alpha) - 1.0))
}

/// Draw a new unit direction with density ℓ(|v_old - η|).
pub fn sample_direction(
    rng: &mut impl Rng,
    kernel: &TurnKernel,
    v_old: [f64; 2],
) -> Result<[f64; 2]> {
    if (norm2(v_old) - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "sample_direction: |v_old| must be 1, got {}",
            norm2(v_old)
        )));
    }
    match kernel.dimension() {
        1 => {
            let p_same = kernel.profile(0.0);
            let p_flip = kernel.profile(PI);
            let total = p_same + p_flip;
            if !(total > 0.0) {
                return Err(Error::Sampler("degenerate 1D kernel: zero mass".into()));
            }
            let u: f64 = rng.gen();
            let sign = if u < p_flip / total { -1.0 } else { 1.0 };
            Ok([sign * v_old[0].signum(), 0.0])
        }
        _ => {
            let m = kernel.profile_max;
            if !(m > 0.0) {
                return Err(Error::Sampler("kernel profile has zero maximum".into()));
            }
            for _ in 0..MAX_REJECTION_ITERS {
                let dth = rng.gen_range(-PI..PI);
                let u: f64 = rng.gen_range(0.0..m);
                if u <= kernel.profile(dth.abs()) {
                    let base = v_old[1].atan2(v_old[0]);
                    let th = base + dth;
                    return Ok([th.cos(), th.sin()]);
                }
            }
            Err(Error::Sampler(format!(
                "direction sampler exceeded {MAX_REJECTION_ITERS} rejections"
            )))
        }
    }
}

/// Specular reflection v ↦ v - 2 (ν·v) ν at a wall with unit normal ν.
pub fn specular_reflect(v: [f64; 2], normal: [f64; 2]) -> Result<[f64; 2]> {
    if (norm2(v) - 1.0).abs() > 1e-9 || (norm2(normal) - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(
            "specular_reflect: inputs must be unit vectors".into(),
        ));
    }
    let d = 2.0 * dot2(normal, v);
    Ok([v[0] - d * normal[0], v[1] - d * normal[1]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64Mcg;

    fn quad2(m: usize) -> SphereQuadrature {
        SphereQuadrature::new(2, m).unwrap()
    }

    #[test]
    fn sphere_areas() {
        assert_eq!(sphere_area(1).unwrap(), 2.0);
        assert!((sphere_area(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        // Standard formula at n = 3 gives the sphere area 4π.
        assert!((sphere_area(3).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!(sphere_area(0).is_err());
    }

    #[test]
    fn quadrature_invariants() {
        for &m in &[16usize, 64, 4096] {
            let q = quad2(m);
            let total = kahan_sum(q.weights().iter().copied());
            assert!((total - 2.0 * PI).abs() < 1e-12, "m={m}: sum {total}");
            for k in 0..2 {
                let odd = kahan_sum(q.nodes().iter().zip(q.weights()).map(|(v, w)| w * v[k]));
                assert!(odd.abs() < 1e-12, "m={m}: odd moment {odd}");
            }
        }
        let q1 = SphereQuadrature::new(1, 0).unwrap();
        assert_eq!(kahan_sum(q1.weights().iter().copied()), 2.0);
    }

    #[test]
    fn kernel_normalization_values() {
        let q = quad2(64);
        let uni = TurnKernel::uniform(2).unwrap();
        assert!((kernel_normalization(&uni, &q).unwrap() - 1.0).abs() < 1e-10);

        let cos = TurnKernel::cosine(2).unwrap();
        assert!((kernel_normalization(&cos, &q).unwrap() - 1.0).abs() < 1e-10);

        // Unnormalised constant 1 integrates to the circumference 2π.
        let raw = TurnKernel::custom(2, Arc::new(|_| 1.0)).unwrap();
        assert!((kernel_normalization(&raw, &q).unwrap() - 2.0 * PI).abs() < 1e-10);

        let vm = TurnKernel::von_mises(2, 3.0).unwrap();
        assert!((kernel_normalization(&vm, &q).unwrap() - 1.0).abs() < 1e-10);

        // n = 1 kernels.
        let q1 = SphereQuadrature::new(1, 0).unwrap();
        let u1 = TurnKernel::uniform(1).unwrap();
        assert!((kernel_normalization(&u1, &q1).unwrap() - 1.0).abs() < 1e-14);

        // Dimension mismatch is a configuration error.
        assert!(kernel_normalization(&u1, &q).is_err());
    }

    #[test]
    fn nu1_uniform_and_cosine() {
        let q = quad2(NU1_QUAD_NODES);
        let uni = TurnKernel::uniform(2).unwrap();
        assert!(eigenvalue_nu1(&uni, &q).unwrap().abs() < 1e-10);

        // Analytic: ∫ cosθ (1+cosθ)/(2π) dθ = 1/2.
        let cos = TurnKernel::cosine(2).unwrap();
        assert!((eigenvalue_nu1(&cos, &q).unwrap() - 0.5).abs() < 1e-10);

        // Unnormalised kernel is rejected.
        let raw = TurnKernel::custom(2, Arc::new(|_| 1.0)).unwrap();
        assert!(eigenvalue_nu1(&raw, &q).is_err());
    }

    #[test]
    fn nu1_von_mises_against_high_res_oracle() {
        // Brute-force quadrature oracle at 10^5 nodes.
        let kappa = 2.5;
        let vm = TurnKernel::von_mises(2, kappa).unwrap();
        let oracle = {
            let m = 100_000usize;
            let z = kahan_sum((0..m).map(|j| {
                let th = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                (kappa * th.cos()).exp() * (2.0 * PI / m as f64)
            }));
            kahan_sum((0..m).map(|j| {
                let th = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                th.cos() * (kappa * th.cos()).exp() / z * (2.0 * PI / m as f64)
            }))
        };
        let q = quad2(NU1_QUAD_NODES);
        let nu1 = eigenvalue_nu1(&vm, &q).unwrap();
        assert!((nu1 - oracle).abs() < 1e-10, "nu1 {nu1} vs oracle {oracle}");
        assert!(nu1 < 1.0);
        assert!(nu1 > 0.0);
    }

    #[test]
    fn scaling_exponent_values() {
        let (mu, varrho) = scaling_exponents(1.5, 0.5).unwrap();
        assert_eq!(mu, 0.5);
        assert_eq!(varrho, 2.0);
        let (mu2, varrho2) = scaling_exponents(2.0, 0.5).unwrap();
        assert_eq!(mu2, 0.0);
        assert_eq!(varrho2, 1.0);
        assert!(scaling_exponents(1.0, 0.5).is_err());
        assert!(scaling_exponents(1.5, 0.4).is_err());
    }

    #[test]
    fn scaling_identity_bit_exact() {
        let mut rng = Pcg64Mcg::seed_from_u64(7);
        for _ in 0..1000 {
            let alpha = rng.gen_range(1.0001..2.0);
            let (mu, varrho) = scaling_exponents(alpha, 0.5).unwrap();
            assert_eq!(varrho - 2.0 * mu, 1.0, "alpha = {alpha}");
            // μ agrees with the direct formula to the last couple of ulps.
            let direct = (2.0 - alpha) / (2.0 * (alpha - 1.0));
            assert!((mu - direct).abs() <= 4.0 * f64::EPSILON * direct.abs().max(1.0));
            assert_eq!(varrho, 1.0 / (alpha - 1.0));
        }
    }

    #[test]
    fn macro_constant_examples() {
        // τ₁ = 0 → χ = 0.
        let (_, chi) = macro_constants(1.5, 1.0, 0.0, 1.0, 0.3, 2).unwrap();
        assert_eq!(chi, 0.0);
        // χ = τ₁ c₀ / (n τ₀) = 0.05.
        let (_, chi) = macro_constants(1.5, 1.0, 0.1, 1.0, 0.3, 2).unwrap();
        assert!((chi - 0.05).abs() < 1e-15);
        // Formula oracle: n=2, ν₁=0, τ₀=c₀=1, α=1.5 → C_α = √π/2.
        let (ca, _) = macro_constants(1.5, 1.0, 0.0, 1.0, 0.0, 2).unwrap();
        assert!((ca - 0.5 * PI.sqrt()).abs() < 1e-12, "C_alpha = {ca}");
        // ν₁ ≥ 1 rejected.
        assert!(macro_constants(1.5, 1.0, 0.0, 1.0, 1.0, 2).is_err());
    }

    #[test]
    fn c_alpha_positive_for_small_nu1() {
        for &alpha in &[1.1, 1.3, 1.5, 1.7, 1.9] {
            for &nu1 in &[-0.5, 0.0, 0.4, 0.9] {
                let (ca, _) = macro_constants(alpha, 0.7, 0.2, 1.3, nu1, 2).unwrap();
                // ν₁ < |S|/n² = π/2 here, so C_α > 0.
                assert!(ca > 0.0, "alpha {alpha} nu1 {nu1}: C_alpha {ca}");
            }
        }
    }

    #[test]
    fn run_time_inverse_transform() {
        // U = 2^(-α), b = 1 → τ = 1 by the closed-form inverse.
        let alpha = 1.5f64;
        let u: f64 = 2f64.powf(-alpha);
        let tau = 1.0 * (u.powf(-1.0 / alpha) - 1.0);
        assert!((tau - 1.0).abs() < 1e-14);
        assert!(sample_run_time(&mut Pcg64Mcg::seed_from_u64(1), 1.5, 0.0).is_err());
    }

    #[test]
    fn run_time_mean_matches_lomax() {
        // Lomax mean b/(α-1) = 2 at α = 1.5, b = 1; 10^6 samples within 5%.
        let mut rng = Pcg64Mcg::seed_from_u64(42);
        let n = 1_000_000usize;
        let mean = kahan_sum((0..n).map(|_| sample_run_time(&mut rng, 1.5, 1.0).unwrap()))
            / n as f64;
        assert!((mean - 2.0).abs() < 0.1, "sample mean {mean}");
    }

    #[test]
    fn direction_sampler_uniform_is_uniform() {
        // χ² goodness of fit over 36 bins, 10^6 draws; critical value for
        // df = 35 at p = 0.001 is 66.62.
        let kernel = TurnKernel::uniform(2).unwrap();
        let mut rng = Pcg64Mcg::seed_from_u64(3);
        let bins = 36usize;
        let draws = 1_000_000usize;
        let mut counts = vec![0usize; bins];
        let v0 = [0.6f64.cos(), 0.6f64.sin()];
        for _ in 0..draws {
            let v = sample_direction(&mut rng, &kernel, v0).unwrap();
            let mut th = v[1].atan2(v[0]);
            if th < 0.0 {
                th += 2.0 * PI;
            }
            let b = ((th / (2.0 * PI) * bins as f64) as usize).min(bins - 1);
            counts[b] += 1;
        }
        let expected = draws as f64 / bins as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 66.62, "chi² = {chi2}");
    }

    #[test]
    fn direction_sampler_concentrated_stays_close() {
        let kernel = TurnKernel::von_mises(2, 400.0).unwrap();
        let mut rng = Pcg64Mcg::seed_from_u64(4);
        let v0 = [1.0, 0.0];
        for _ in 0..2000 {
            let v = sample_direction(&mut rng, &kernel, v0).unwrap();
            // κ = 400 concentrates the turn angle within ~4/√κ = 0.2 rad.
            assert!(angle_between(v, v0) < 0.25);
            assert!((norm2(v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn direction_sampler_depends_only_on_separation() {
        // Two-sample Kolmogorov–Smirnov on the turn angle for two different
        // v_old; critical value at p = 0.001 for n = m = 10^5.
        let kernel = TurnKernel::cosine(2).unwrap();
        let n = 100_000usize;
        let sample = |seed: u64, v0: [f64; 2]| {
            let mut rng = Pcg64Mcg::seed_from_u64(seed);
            let mut a: Vec<f64> = (0..n)
                .map(|_| angle_between(sample_direction(&mut rng, &kernel, v0).unwrap(), v0))
                .collect();
            a.sort_by(|x, y| x.partial_cmp(y).unwrap());
            a
        };
        let a = sample(10, [1.0, 0.0]);
        let b = sample(11, [-0.3f64.cos(), -0.3f64.sin()]);
        // KS statistic by merge scan.
        let mut i = 0;
        let mut j = 0;
        let mut d: f64 = 0.0;
        while i < n && j < n {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / n as f64 - j as f64 / n as f64).abs());
        }
        let crit = 1.9495 * (2.0 / n as f64).sqrt();
        assert!(d < crit, "KS statistic {d} vs critical {crit}");
    }

    #[test]
    fn reflection_examples() {
        let r = specular_reflect([-1.0, 0.0], [1.0, 0.0]).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-15 && r[1].abs() < 1e-15);
        let s = 2f64.sqrt() / 2.0;
        let r = specular_reflect([-s, s], [1.0, 0.0]).unwrap();
        assert!((r[0] - s).abs() < 1e-15 && (r[1] - s).abs() < 1e-15);
        assert!(specular_reflect([2.0, 0.0], [1.0, 0.0]).is_err());
    }

    #[test]
    fn reflection_involution_and_norm() {
        let mut rng = Pcg64Mcg::seed_from_u64(5);
        for _ in 0..1000 {
            let a = rng.gen_range(0.0..2.0 * PI);
            let b = rng.gen_range(0.0..2.0 * PI);
            let v = [a.cos(), a.sin()];
            let nu = [b.cos(), b.sin()];
            let r = specular_reflect(v, nu).unwrap();
            assert!((norm2(r) - 1.0).abs() < 1e-14);
            let rr = specular_reflect(r, nu).unwrap();
            assert!((rr[0] - v[0]).abs() < 1e-14 && (rr[1] - v[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn chemical_field_gradient_consistency() {
        // Finite-difference check of grad_rho at 100 random points, 1e-6 rel.
        let fields = [
            ChemicalField::linear([0.3, -0.7]),
            ChemicalField::gaussian(2.0, [0.2, -0.1], 0.8),
        ];
        let mut rng = Pcg64Mcg::seed_from_u64(6);
        for field in &fields {
            for _ in 0..100 {
                let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let g = field.grad_rho(x);
                let h = 1e-6;
                for k in 0..2 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[k] += h;
                    xm[k] -= h;
                    let fd = (field.rho(xp) - field.rho(xm)) / (2.0 * h);
                    let scale = g[k].abs().max(1.0);
                    assert!(
                        (fd - g[k]).abs() / scale < 1e-6,
                        "grad mismatch: fd {fd} vs {g:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn model_params_derivation() {
        let kernel = TurnKernel::cosine(2).unwrap();
        let p = ModelParams::derive(1.5, 1.0, 0.2, 1.0, 0.1, &kernel).unwrap();
        assert!((p.nu1 - 0.5).abs() < 1e-10);
        assert_eq!(p.varrho - 2.0 * p.mu, 1.0);
        assert!((p.chi - 0.2 / 2.0).abs() < 1e-15);
        assert!(p.c_alpha > 0.0);
        // α = 2 requires an explicit diffusivity.
        assert!(ModelParams::derive(2.0, 1.0, 0.0, 1.0, 0.1, &kernel).is_err());
        let p2 = ModelParams::derive_with_override(2.0, 1.0, 0.0, 1.0, 0.1, &kernel, Some(0.3))
            .unwrap();
        assert_eq!(p2.c_alpha, 0.3);
        assert_eq!(p2.mu, 0.0);
        assert_eq!(p2.varrho, 1.0);
    }
}
