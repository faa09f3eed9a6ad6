//! Monte Carlo simulation of the velocity-jump process with heavy-tailed run
//! times, chemically modulated tumbling and specular reflection, on an
//! interval or a disc.
//!
//! The ensemble runs in macroscopic units: particles move at speed
//! c0 ε^(-1/2), and run durations are Lomax samples scaled by ε^(1+μ). With
//! these two factors the jump-length tail and the tumble rate combine to an
//! ε-free fractional generator, so the empirical density approaches the
//! macroscopic solver's solution as ε shrinks.

use crate::error::{Error, Result};
use crate::kinetic::{
    sample_direction, sample_run_time, specular_reflect, ChemicalField, ModelParams, TurnKernel,
};
use crate::util::{dot2, kahan_sum, norm2, splitmix64};
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Fraction of τ₀ used as the lower clamp for the run-time scale.
pub const RUN_SCALE_CLAMP: f64 = 0.01;
const MAX_REFLECTIONS: usize = 1_000_000;

/// Simulation domain.
#[derive(Debug, Clone, Copy)]
pub enum DomainGeometry {
    /// 0 ≤ x ≤ L.
    Interval { length: f64 },
    /// |x| ≤ R.
    Disc { radius: f64 },
}

impl DomainGeometry {
    pub fn extent(&self) -> f64 {
        match self {
            DomainGeometry::Interval { length } => *length,
            DomainGeometry::Disc { radius } => *radius,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            DomainGeometry::Interval { .. } => 1,
            DomainGeometry::Disc { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.extent() > 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "domain extent must be > 0, got {}",
                self.extent()
            )))
        }
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        match self {
            DomainGeometry::Interval { length } => x[0] >= 0.0 && x[0] <= *length,
            DomainGeometry::Disc { radius } => norm2(x) <= *radius * (1.0 + 1e-12),
        }
    }

    /// Unit inner normal at a boundary point, if `x` lies on the boundary.
    pub fn inner_normal(&self, x: [f64; 2]) -> Option<[f64; 2]> {
        let tol = 1e-9 * self.extent();
        match self {
            DomainGeometry::Interval { length } => {
                if x[0].abs() <= tol {
                    Some([1.0, 0.0])
                } else if (x[0] - length).abs() <= tol {
                    Some([-1.0, 0.0])
                } else {
                    None
                }
            }
            DomainGeometry::Disc { radius } => {
                let r = norm2(x);
                if (r - radius).abs() <= tol && r > 0.0 {
                    Some([-x[0] / r, -x[1] / r])
                } else {
                    None
                }
            }
        }
    }
}

/// Microscopic state of one walker.
#[derive(Debug, Clone, Copy)]
pub struct ParticleState {
    pub position: [f64; 2],
    /// Unit direction; the speed lives in the ensemble parameters.
    pub direction: [f64; 2],
    /// Remaining run duration in macroscopic time.
    pub remaining_run: f64,
}

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

/// Binned density over the domain: uniform bins on the interval, equal-width
/// radial annuli on the disc.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityHistogram {
    geom_kind: u8,
    extent: f64,
    pub counts: Vec<u64>,
    pub time: f64,
}

impl DensityHistogram {
    fn new(geom: &DomainGeometry, bins: usize, time: f64) -> Self {
        DensityHistogram {
            geom_kind: geom.dimension() as u8,
            extent: geom.extent(),
            counts: vec![0; bins],
            time,
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        let w = self.extent / self.bins() as f64;
        (i as f64 + 0.5) * w
    }

    /// Measure (length or area) of bin i.
    pub fn bin_volume(&self, i: usize) -> f64 {
        let w = self.extent / self.bins() as f64;
        match self.geom_kind {
            1 => w,
            _ => {
                let r0 = i as f64 * w;
                let r1 = r0 + w;
                PI * (r1 * r1 - r0 * r0)
            }
        }
    }

    fn bin_of(&self, x: [f64; 2]) -> usize {
        let w = self.extent / self.bins() as f64;
        let coord = match self.geom_kind {
            1 => x[0],
            _ => norm2(x),
        };
        ((coord / w) as usize).min(self.bins() - 1)
    }

    /// Normalised density: fraction of particles per bin divided by the bin
    /// measure; integrates to 1 over the domain.
    pub fn density(&self) -> Vec<f64> {
        let total = self.total_count() as f64;
        (0..self.bins())
            .map(|i| self.counts[i] as f64 / (total * self.bin_volume(i)))
            .collect()
    }

    /// ∫ density = Σ density_i · |bin_i|.
    pub fn mass(&self) -> f64 {
        let d = self.density();
        kahan_sum((0..self.bins()).map(|i| d[i] * self.bin_volume(i)))
    }
}

/// Histogram a set of positions; every position must lie in the domain.
pub fn empirical_density(
    positions: &[[f64; 2]],
    geom: &DomainGeometry,
    bins: usize,
    time: f64,
) -> Result<DensityHistogram> {
    if bins == 0 {
        return Err(Error::Argument("empirical_density: bins must be >= 1".into()));
    }
    let mut hist = DensityHistogram::new(geom, bins, time);
    for &x in positions {
        if !geom.contains(x) {
            return Err(Error::Internal(format!(
                "empirical_density: position {x:?} outside the domain"
            )));
        }
        let b = hist.bin_of(x);
        hist.counts[b] += 1;
    }
    Ok(hist)
}

// ---------------------------------------------------------------------------
// Motion
// ---------------------------------------------------------------------------

/// Straight-line motion at `speed` for a total path time `duration`, applying
/// specular reflection at every wall hit.
pub fn advect_and_reflect(
    state: &ParticleState,
    duration: f64,
    geom: &DomainGeometry,
    speed: f64,
) -> Result<ParticleState> {
    if duration < 0.0 {
        return Err(Error::Argument(format!(
            "advect_and_reflect: negative duration {duration}"
        )));
    }
    let path = speed * duration;
    match geom {
        DomainGeometry::Interval { length } => {
            let l = *length;
            let dir = state.direction[0];
            let raw = state.position[0] + dir * path;
            let reflections = ((raw.abs() / l) as u64).max(0);
            if reflections > MAX_REFLECTIONS as u64 {
                return Err(Error::Runaway(format!(
                    "interval run crossed the domain {reflections} times"
                )));
            }
            let p = raw.rem_euclid(2.0 * l);
            let (x, flip) = if p <= l { (p, 1.0) } else { (2.0 * l - p, -1.0) };
            Ok(ParticleState {
                position: [x, 0.0],
                direction: [dir * flip, 0.0],
                remaining_run: state.remaining_run,
            })
        }
        DomainGeometry::Disc { radius } => {
            let r = *radius;
            let mut x = state.position;
            let mut v = state.direction;
            let mut s = path;
            let mut hits = 0usize;
            loop {
                let xv = dot2(x, v);
                let gap = (r * r - dot2(x, x)).max(0.0);
                let t_hit = -xv + (xv * xv + gap).sqrt();
                if t_hit >= s {
                    x = [x[0] + s * v[0], x[1] + s * v[1]];
                    break;
                }
                x = [x[0] + t_hit * v[0], x[1] + t_hit * v[1]];
                let nrm = norm2(x);
                let nu = [-x[0] / nrm, -x[1] / nrm];
                v = specular_reflect(v, nu)?;
                // Nudge inward so the wall is not re-detected immediately.
                let nudge = 1e-14 * r;
                x = [x[0] + nu[0] * nudge, x[1] + nu[1] * nudge];
                s -= t_hit;
                hits += 1;
                if hits > MAX_REFLECTIONS {
                    return Err(Error::Runaway(format!(
                        "disc run exceeded {MAX_REFLECTIONS} reflections"
                    )));
                }
            }
            Ok(ParticleState {
                position: x,
                direction: v,
                remaining_run: state.remaining_run,
            })
        }
    }
}

/// Run-time scale b = τ₀ + τ₁ ε^(1-γ) c₀ v·∇ρ, clamped to 0.01 τ₀.
pub fn run_scale(params: &ModelParams, field: &ChemicalField, x: [f64; 2], v: [f64; 2]) -> f64 {
    let dv_rho = params.epsilon.powf(1.0 - params.gamma_exp)
        * params.c0
        * dot2(v, field.grad_rho(x));
    let raw = params.tau0 + params.tau1 * dv_rho;
    raw.max(RUN_SCALE_CLAMP * params.tau0)
}

/// Reorientation event: draw a new direction from the kernel, reflect it if
/// it points out of the domain at a wall, then draw a fresh run duration.
pub fn tumble(
    state: &ParticleState,
    field: &ChemicalField,
    params: &ModelParams,
    kernel: &TurnKernel,
    geom: &DomainGeometry,
    rng: &mut impl Rng,
) -> Result<ParticleState> {
    let mut dir = sample_direction(rng, kernel, state.direction)?;
    if let Some(nu) = geom.inner_normal(state.position) {
        if dot2(dir, nu) < 0.0 {
            dir = specular_reflect(dir, nu)?;
        }
    }
    let b = run_scale(params, field, state.position, dir);
    let tau_micro = sample_run_time(rng, params.alpha, b)?;
    // Macro run duration: the ε^(1+μ) factor pairs with the ε^(-1/2) speed.
    let run = params.epsilon.powf(1.0 + params.mu) * tau_micro;
    Ok(ParticleState {
        position: state.position,
        direction: dir,
        remaining_run: run,
    })
}

// ---------------------------------------------------------------------------
// Ensemble simulation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub n_particles: usize,
    pub horizon: f64,
    pub snapshot_times: Vec<f64>,
    pub bins: usize,
    pub seed: u64,
    /// Release point; defaults to the domain center.
    pub start: Option<[f64; 2]>,
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
}

fn initial_position(geom: &DomainGeometry, start: Option<[f64; 2]>) -> [f64; 2] {
    start.unwrap_or(match geom {
        DomainGeometry::Interval { length } => [0.5 * length, 0.0],
        DomainGeometry::Disc { .. } => [0.0, 0.0],
    })
}

fn initial_direction(rng: &mut impl Rng, dimension: usize) -> [f64; 2] {
    match dimension {
        1 => {
            if rng.gen::<bool>() {
                [1.0, 0.0]
            } else {
                [-1.0, 0.0]
            }
        }
        _ => {
            let th = rng.gen_range(0.0..2.0 * PI);
            [th.cos(), th.sin()]
        }
    }
}

/// Simulate one particle and record its bin index at every snapshot time.
fn walk_particle(
    index: u64,
    cfg: &EnsembleConfig,
    params: &ModelParams,
    geom: &DomainGeometry,
    field: &ChemicalField,
    kernel: &TurnKernel,
    template: &DensityHistogram,
) -> Result<Vec<usize>> {
    let mut rng = Pcg64Mcg::seed_from_u64(splitmix64(
        cfg.seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15),
    ));
    let speed = params.c0 * params.epsilon.powf(-params.gamma_exp);
    let x0 = initial_position(geom, cfg.start);
    let dir = initial_direction(&mut rng, geom.dimension());
    let mut state = ParticleState {
        position: x0,
        direction: dir,
        remaining_run: 0.0,
    };
    // Fresh first run, as if the particle had just tumbled at the release.
    state = tumble(&state, field, params, kernel, geom, &mut rng)?;

    let mut t = 0.0f64;
    let mut out = Vec::with_capacity(cfg.snapshot_times.len());
    for &t_snap in &cfg.snapshot_times {
        while t + state.remaining_run < t_snap {
            let dt = state.remaining_run;
            state = advect_and_reflect(&state, dt, geom, speed)?;
            t += dt;
            state = tumble(&state, field, params, kernel, geom, &mut rng)?;
        }
        // Mid-run at the snapshot: advance linearly along the current run.
        let dt = t_snap - t;
        state = advect_and_reflect(&state, dt, geom, speed)?;
        state.remaining_run -= dt;
        t = t_snap;
        out.push(template.bin_of(state.position));
    }
    Ok(out)
}

/// Run the ensemble and return one histogram per snapshot time.
///
/// Deterministic for a fixed seed and independent of the worker count:
/// every particle owns a stream derived from (seed, particle index) and the
/// per-bin counts are merged additively.
pub fn simulate_ensemble(
    cfg: &EnsembleConfig,
    params: &ModelParams,
    geom: &DomainGeometry,
    field: &ChemicalField,
    kernel: &TurnKernel,
) -> Result<Vec<DensityHistogram>> {
    geom.validate()?;
    if cfg.n_particles == 0 {
        return Err(Error::Config("ensemble needs at least one particle".into()));
    }
    if cfg.bins == 0 {
        return Err(Error::Config("ensemble needs at least one bin".into()));
    }
    if cfg.snapshot_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("snapshot times must be ascending".into()));
    }
    if cfg
        .snapshot_times
        .iter()
        .any(|&t| t < 0.0 || t > cfg.horizon)
    {
        return Err(Error::Config(
            "snapshot times must lie within [0, horizon]".into(),
        ));
    }
    if kernel.dimension() != geom.dimension() {
        return Err(Error::Config(format!(
            "kernel dimension {} does not match geometry dimension {}",
            kernel.dimension(),
            geom.dimension()
        )));
    }
    let template = DensityHistogram::new(geom, cfg.bins, 0.0);
    let n_snaps = cfg.snapshot_times.len();

    let body = || -> Result<Vec<Vec<u64>>> {
        (0..cfg.n_particles as u64)
            .into_par_iter()
            .map(|i| walk_particle(i, cfg, params, geom, field, kernel, &template))
            .try_fold(
                || vec![vec![0u64; cfg.bins]; n_snaps],
                |mut acc, bins| {
                    let bins = bins?;
                    for (s, b) in bins.into_iter().enumerate() {
                        acc[s][b] += 1;
                    }
                    Ok(acc)
                },
            )
            .try_reduce(
                || vec![vec![0u64; cfg.bins]; n_snaps],
                |mut a, b| {
                    for (sa, sb) in a.iter_mut().zip(b) {
                        for (ca, cb) in sa.iter_mut().zip(sb) {
                            *ca += cb;
                        }
                    }
                    Ok(a)
                },
            )
    };
    let merged = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(body),
        None => body(),
    }?;

    Ok(merged
        .into_iter()
        .zip(&cfg.snapshot_times)
        .map(|(counts, &t)| DensityHistogram {
            geom_kind: geom.dimension() as u8,
            extent: geom.extent(),
            counts,
            time: t,
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Tail diagnostics
// ---------------------------------------------------------------------------

/// Hill estimator of the tail index over the k largest order statistics.
pub fn hill_tail_index(samples: &[f64], k: usize) -> Result<f64> {
    if k < 10 || k >= samples.len() {
        return Err(Error::Argument(format!(
            "hill_tail_index: need 10 <= k < {} samples, got k = {k}",
            samples.len()
        )));
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let threshold = sorted[k];
    if threshold <= 0.0 {
        return Err(Error::Argument(
            "hill_tail_index: samples must be positive in the tail".into(),
        ));
    }
    let mean_log = kahan_sum(sorted[..k].iter().map(|x| (x / threshold).ln())) / k as f64;
    Ok(1.0 / mean_log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::sample_run_time;

    fn params_1d(alpha: f64, tau1: f64, epsilon: f64) -> ModelParams {
        let kernel = TurnKernel::uniform(1).unwrap();
        ModelParams::derive(alpha, 1.0, tau1, 1.0, epsilon, &kernel).unwrap()
    }

    #[test]
    fn interval_free_flight_and_bounce() {
        let geom = DomainGeometry::Interval { length: 1.0 };
        let s = ParticleState {
            position: [0.5, 0.0],
            direction: [1.0, 0.0],
            remaining_run: 0.0,
        };
        let out = advect_and_reflect(&s, 0.2, &geom, 1.0).unwrap();
        assert!((out.position[0] - 0.7).abs() < 1e-14);
        assert_eq!(out.direction[0], 1.0);

        let s = ParticleState {
            position: [0.9, 0.0],
            direction: [1.0, 0.0],
            remaining_run: 0.0,
        };
        let out = advect_and_reflect(&s, 0.2, &geom, 1.0).unwrap();
        assert!((out.position[0] - 0.9).abs() < 1e-14, "{}", out.position[0]);
        assert_eq!(out.direction[0], -1.0);
    }

    #[test]
    fn disc_runs_stay_inside_with_constant_speed() {
        let geom = DomainGeometry::Disc { radius: 1.0 };
        let mut rng = Pcg64Mcg::seed_from_u64(9);
        for _ in 0..10_000 {
            let th = rng.gen_range(0.0..2.0 * PI);
            let r = rng.gen_range(0.0..0.999f64);
            let ph = rng.gen_range(0.0..2.0 * PI);
            let s = ParticleState {
                position: [r * ph.cos(), r * ph.sin()],
                direction: [th.cos(), th.sin()],
                remaining_run: 0.0,
            };
            let out = advect_and_reflect(&s, rng.gen_range(0.0..5.0), &geom, 1.0).unwrap();
            assert!(norm2(out.position) <= 1.0 + 1e-12);
            assert!((norm2(out.direction) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tumble_scale_behaviour() {
        let field0 = ChemicalField::constant(1.0);
        let p = params_1d(1.5, 0.0, 0.25);
        // tau1 = 0: the scale is exactly tau0 everywhere.
        assert_eq!(run_scale(&p, &field0, [0.3, 0.0], [1.0, 0.0]), p.tau0);

        // Adversarial gradient drives tau0 + tau1 D^v rho negative: clamp.
        let p = params_1d(1.5, 5.0, 0.25);
        let steep = ChemicalField::linear([-100.0, 0.0]);
        let b = run_scale(&p, &steep, [0.3, 0.0], [1.0, 0.0]);
        assert_eq!(b, RUN_SCALE_CLAMP * p.tau0);
    }

    #[test]
    fn aligned_runs_are_stochastically_longer() {
        // Mann-Whitney on run times drawn with aligned vs anti-aligned
        // directions in a linear chemical field; p < 0.001 one-sided.
        let p = params_1d(1.5, 0.5, 0.25);
        let field = ChemicalField::linear([1.0, 0.0]);
        let b_plus = run_scale(&p, &field, [0.5, 0.0], [1.0, 0.0]);
        let b_minus = run_scale(&p, &field, [0.5, 0.0], [-1.0, 0.0]);
        assert!(b_plus > b_minus);
        let n = 100_000usize;
        let mut rng = Pcg64Mcg::seed_from_u64(21);
        let xs: Vec<f64> = (0..n)
            .map(|_| sample_run_time(&mut rng, p.alpha, b_plus).unwrap())
            .collect();
        let ys: Vec<f64> = (0..n)
            .map(|_| sample_run_time(&mut rng, p.alpha, b_minus).unwrap())
            .collect();
        // Rank-sum U statistic via a merge over the sorted pool.
        let mut all: Vec<(f64, bool)> = xs
            .iter()
            .map(|&v| (v, true))
            .chain(ys.iter().map(|&v| (v, false)))
            .collect();
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut rank_sum_x = 0.0f64;
        for (i, (_, is_x)) in all.iter().enumerate() {
            if *is_x {
                rank_sum_x += (i + 1) as f64;
            }
        }
        let nf = n as f64;
        let u_stat = rank_sum_x - nf * (nf + 1.0) / 2.0;
        let mean = nf * nf / 2.0;
        let sd = (nf * nf * (2.0 * nf + 1.0) / 12.0).sqrt();
        let z = (u_stat - mean) / sd;
        assert!(z > 3.09, "one-sided z = {z}");
    }

    #[test]
    fn ensemble_conserves_particles_and_is_deterministic() {
        let p = params_1d(1.5, 0.3, 0.25);
        let kernel = TurnKernel::uniform(1).unwrap();
        let geom = DomainGeometry::Interval { length: 1.0 };
        let field = ChemicalField::gaussian(1.0, [0.5, 0.0], 0.2);
        let cfg = EnsembleConfig {
            n_particles: 10_000,
            horizon: 2.0,
            snapshot_times: vec![0.5, 1.0, 2.0],
            bins: 20,
            seed: 7,
            start: None,
            workers: None,
        };
        let hists = simulate_ensemble(&cfg, &p, &geom, &field, &kernel).unwrap();
        for h in &hists {
            assert_eq!(h.total_count(), 10_000);
            assert!((h.mass() - 1.0).abs() < 1e-12);
        }
        // Identical seed, different worker counts: identical output.
        let mut cfg1 = cfg.clone();
        cfg1.workers = Some(1);
        let mut cfg4 = cfg.clone();
        cfg4.workers = Some(4);
        let h1 = simulate_ensemble(&cfg1, &p, &geom, &field, &kernel).unwrap();
        let h4 = simulate_ensemble(&cfg4, &p, &geom, &field, &kernel).unwrap();
        assert_eq!(h1, h4);
        assert_eq!(h1, hists);
    }

    #[test]
    fn ensemble_rejects_bad_snapshots() {
        let p = params_1d(1.5, 0.0, 0.25);
        let kernel = TurnKernel::uniform(1).unwrap();
        let geom = DomainGeometry::Interval { length: 1.0 };
        let field = ChemicalField::constant(0.0);
        let cfg = EnsembleConfig {
            n_particles: 10,
            horizon: 1.0,
            snapshot_times: vec![0.8, 0.2],
            bins: 4,
            seed: 1,
            start: None,
            workers: Some(1),
        };
        assert!(simulate_ensemble(&cfg, &p, &geom, &field, &kernel).is_err());
    }

    #[test]
    fn mid_run_snapshot_interpolates_linearly() {
        // tau0 so large that the first run outlives the snapshot; position is
        // then exactly start + direction * speed * t.
        let kernel = TurnKernel::uniform(1).unwrap();
        let p = ModelParams::derive(1.5, 1e9, 0.0, 1.0, 0.25, &kernel).unwrap();
        let geom = DomainGeometry::Interval { length: 1e6 };
        let field = ChemicalField::constant(0.0);
        let cfg = EnsembleConfig {
            n_particles: 1,
            horizon: 0.5,
            snapshot_times: vec![0.5],
            bins: 100_000,
            seed: 3,
            start: None,
            workers: Some(1),
        };
        let h = simulate_ensemble(&cfg, &p, &geom, &field, &kernel).unwrap();
        let speed = p.c0 * p.epsilon.powf(-0.5);
        let expected_offset = speed * 0.5;
        let idx = h[0].counts.iter().position(|&c| c > 0).unwrap();
        let x = h[0].bin_center(idx);
        let d = (x - (5e5 - expected_offset)).abs().min((x - (5e5 + expected_offset)).abs());
        assert!(d <= h[0].extent / h[0].bins() as f64, "offset {d}");
    }

    #[test]
    fn equilibration_to_uniform_on_interval() {
        // tau1 = 0: the reflected walk equilibrates; the time-averaged
        // late-time histogram is uniform within 3σ multinomial bands.
        let p = params_1d(1.5, 0.0, 0.25);
        let kernel = TurnKernel::uniform(1).unwrap();
        let geom = DomainGeometry::Interval { length: 1.0 };
        let field = ChemicalField::constant(0.0);
        // Incommensurate snapshot times: the never-tumbled cohort refolds to
        // its release point whenever speed·t hits a multiple of 2L, so
        // resonant times would stack a ballistic echo into one bin.
        let snaps: Vec<f64> = (0..10).map(|i| 6.0 + 0.73 * i as f64).collect();
        let cfg = EnsembleConfig {
            n_particles: 40_000,
            horizon: 13.0,
            snapshot_times: snaps.clone(),
            bins: 20,
            seed: 11,
            start: None,
            workers: None,
        };
        let hists = simulate_ensemble(&cfg, &p, &geom, &field, &kernel).unwrap();
        let mut agg = vec![0u64; 20];
        for h in &hists {
            for (a, c) in agg.iter_mut().zip(&h.counts) {
                *a += c;
            }
        }
        let total: u64 = agg.iter().sum();
        let expect = total as f64 / 20.0;
        let sigma = (total as f64 * (1.0 / 20.0) * (1.0 - 1.0 / 20.0)).sqrt();
        for (i, &c) in agg.iter().enumerate() {
            assert!(
                (c as f64 - expect).abs() <= 3.0 * sigma,
                "bin {i}: {c} vs {expect} ± {sigma}"
            );
        }
    }

    #[test]
    fn hill_estimator_on_lomax_and_exponential() {
        let mut rng = Pcg64Mcg::seed_from_u64(17);
        let n = 1_000_000usize;
        let lomax: Vec<f64> = (0..n)
            .map(|_| sample_run_time(&mut rng, 1.5, 1.0).unwrap())
            .collect();
        let hat = hill_tail_index(&lomax, 10_000).unwrap();
        assert!((1.4..=1.6).contains(&hat), "hill estimate {hat}");

        // Exponential tails: the estimate drifts upward as k shrinks, with no
        // power-law plateau.
        let exp: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().ln()).collect();
        let h4 = hill_tail_index(&exp, 10_000).unwrap();
        let h3 = hill_tail_index(&exp, 1_000).unwrap();
        let lomax_h3 = hill_tail_index(&lomax, 1_000).unwrap();
        assert!(h3 / h4 > 1.2, "exponential drift {h3} vs {h4}");
        assert!((lomax_h3 / hat - 1.0).abs() < 0.15, "lomax plateau broken");

        // Argument errors.
        assert!(hill_tail_index(&lomax, 0).is_err());
        assert!(hill_tail_index(&lomax, 9).is_err());
        assert!(hill_tail_index(&lomax, n).is_err());
    }
}
