//! Pipeline dispatch: each subcommand builds its model objects from the
//! configuration, runs, and writes CSV datasets plus JSON reports into the
//! output directory. Given (config, seed) the output bytes are fully
//! deterministic.

use crate::config::{RunConfig, SUBCOMMANDS};
use crate::dataset::{emit_dataset, emit_report, Dataset};
use crate::error::{Error, Result};
use crate::kinetic::{
    eigenvalue_nu1, kernel_normalization, macro_constants, sphere_area, SphereQuadrature,
    NU1_QUAD_NODES,
};
use crate::layer::{
    boundary_operator_h, extract_albedo, flux_moment, matching_residual, recover_a0,
    reflection_r, solve_halfspace, theta_nullspace, curved_conservation_check, HalfSpaceGrid,
    OrdinateSet, PromptKernel, TransportOperator,
};
use crate::macro_solver::{total_mass, Grid1D, MacroSolver, ScalarField, Scheme, SolveOptions};
use crate::mc::{simulate_ensemble, DomainGeometry, EnsembleConfig};
use crate::special::gamma_reflection;
use serde_json::json;
use std::path::{Path, PathBuf};

/// Outcome summary returned to the CLI.
#[derive(Debug)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
}

/// Extra switches layered on top of the configuration file.
#[derive(Debug, Default, Clone)]
pub struct RunOverrides {
    pub seed: Option<u64>,
    pub out_dir: Option<String>,
    pub dump_operator: bool,
}

fn worker_cap() -> Option<usize> {
    std::env::var("FRACKIX_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|n| *n > 0)
}

/// Dispatch a validated configuration to the named pipeline.
pub fn run(subcommand: &str, cfg: &RunConfig, overrides: &RunOverrides) -> Result<RunOutput> {
    if !SUBCOMMANDS.contains(&subcommand) {
        return Err(Error::Config(format!(
            "unknown subcommand {subcommand:?}; expected one of {SUBCOMMANDS:?}"
        )));
    }
    if let Some(sc) = &cfg.subcommand {
        if sc != subcommand {
            return Err(Error::Config(format!(
                "config names subcommand {sc:?} but {subcommand:?} was invoked"
            )));
        }
    }
    let mut cfg = cfg.clone();
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &overrides.out_dir {
        cfg.out_dir = Some(dir.clone());
    }
    let out_dir = PathBuf::from(cfg.out_dir.clone().unwrap_or_else(|| "out".into()));

    match subcommand {
        "spectra" => run_spectra(&cfg, &out_dir),
        "mc" => run_mc(&cfg, &out_dir),
        "macro" => run_macro(&cfg, &out_dir, overrides.dump_operator),
        "milne" => run_milne(&cfg, &out_dir),
        "match" => run_match(&cfg, &out_dir),
        "curved" => run_curved(&cfg, &out_dir),
        _ => unreachable!(),
    }
}

fn run_spectra(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let kernel = cfg.build_kernel()?;
    let n = kernel.dimension();
    let quad = SphereQuadrature::new(n, NU1_QUAD_NODES)?;
    let norm = kernel_normalization(&kernel, &quad)?;
    let nu1 = eigenvalue_nu1(&kernel, &quad)?;
    let params = cfg.build_params()?;
    let (c_alpha, chi) = if cfg.alpha < 2.0 {
        macro_constants(cfg.alpha, cfg.tau0, cfg.tau1, cfg.c0, nu1, n)?
    } else {
        (params.c_alpha, params.chi)
    };
    let gamma_1ma = if cfg.alpha < 2.0 {
        Some(gamma_reflection(cfg.alpha)?)
    } else {
        None
    };
    let report = json!({
        "kernel": cfg.kernel.kind,
        "dimension": n,
        "normalization": norm,
        "nu1": nu1,
        "mu": params.mu,
        "varrho": params.varrho,
        "c_alpha": c_alpha,
        "chi": chi,
        "gamma_one_minus_alpha": gamma_1ma,
        "sphere_area": sphere_area(n)?,
    });
    let mut files = vec![emit_report(
        "spectra",
        &serde_json::to_string_pretty(&report).unwrap(),
        dir,
    )?];
    let mut ds = Dataset::new(
        "spectra",
        &["nu1", "mu", "varrho", "c_alpha", "chi", "sphere_area"],
    );
    ds.push(vec![
        nu1,
        params.mu,
        params.varrho,
        c_alpha,
        chi,
        sphere_area(n)?,
    ])?;
    files.push(emit_dataset(&ds, dir, cfg, cfg.seed)?);
    Ok(RunOutput { files })
}

fn run_mc(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let params = cfg.build_params()?;
    let geom = cfg.build_geometry()?;
    let field = cfg.build_field()?;
    let kernel = cfg.build_kernel()?;
    let ens = EnsembleConfig {
        n_particles: cfg.particles,
        horizon: cfg.horizon,
        snapshot_times: cfg.snapshot_times(),
        bins: cfg.n_cells,
        seed: cfg.seed,
        start: None,
        workers: worker_cap(),
    };
    let hists = simulate_ensemble(&ens, &params, &geom, &field, &kernel)?;
    let mut ds = Dataset::new("mc", &["time", "bin_center", "density"]);
    for h in &hists {
        let d = h.density();
        for i in 0..h.bins() {
            ds.push(vec![h.time, h.bin_center(i), d[i]])?;
        }
    }
    let files = vec![emit_dataset(&ds, dir, cfg, cfg.seed)?];
    Ok(RunOutput { files })
}

fn macro_initial(cfg: &RunConfig, grid: &Grid1D) -> ScalarField {
    match cfg.initial.as_deref() {
        Some("uniform") => ScalarField::new(vec![1.0 / grid.length(); grid.n()], 0.0),
        // Mollified point release at the domain center: all mass in the
        // center cell, total mass 1.
        _ => {
            let mut v = vec![0.0; grid.n()];
            v[grid.n() / 2] = 1.0 / grid.spacing();
            ScalarField::new(v, 0.0)
        }
    }
}

fn run_macro(cfg: &RunConfig, dir: &Path, dump_operator: bool) -> Result<RunOutput> {
    let params = cfg.build_params()?;
    let geom = cfg.build_geometry()?;
    let length = match geom {
        DomainGeometry::Interval { length } => length,
        DomainGeometry::Disc { .. } => {
            return Err(Error::Config(
                "the macroscopic solver runs on interval geometry".into(),
            ))
        }
    };
    let field = cfg.build_field()?;
    let grid = Grid1D::new(cfg.n_cells, length)?;
    let solver = MacroSolver::new(grid, params, &field)?;
    let u0 = macro_initial(cfg, solver.grid());
    let opts = SolveOptions {
        scheme: match cfg.scheme.as_deref() {
            Some("imex") => Scheme::ImexDiffusion,
            _ => Scheme::Explicit,
        },
        dt: None,
    };
    let snaps = cfg.snapshot_times();
    let out = solver.solve(&u0, cfg.horizon, &snaps, &opts)?;
    let mut ds = Dataset::new("macro", &["time", "x", "u"]);
    for field_t in &out {
        for i in 0..solver.grid().n() {
            ds.push(vec![field_t.time, solver.grid().center(i), field_t.values[i]])?;
        }
    }
    let mut files = vec![emit_dataset(&ds, dir, cfg, cfg.seed)?];
    if dump_operator {
        let a = solver.divgrad().matrix();
        let n = solver.grid().n();
        let cols: Vec<String> = (0..n).map(|j| format!("c{j}")).collect();
        let col_refs: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
        let mut op_ds = Dataset::new("operator", &col_refs);
        for i in 0..n {
            op_ds.push((0..n).map(|j| a[(i, j)]).collect())?;
        }
        files.push(emit_dataset(&op_ds, dir, cfg, cfg.seed)?);
    }
    let masses: Vec<f64> = out.iter().map(|u| total_mass(solver.grid(), u)).collect();
    let report = json!({
        "stable_dt": solver.stable_dt(),
        "mass": masses,
        "c_alpha": params.c_alpha,
        "chi": params.chi,
    });
    files.push(emit_report(
        "macro_report",
        &serde_json::to_string_pretty(&report).unwrap(),
        dir,
    )?);
    Ok(RunOutput { files })
}

fn run_milne(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let kernel = {
        // The layer lives on the circle regardless of any geometry block.
        match cfg.kernel.kind.as_str() {
            "uniform" => crate::kinetic::TurnKernel::uniform(2)?,
            "cosine" => crate::kinetic::TurnKernel::cosine(2)?,
            "vonmises" => {
                crate::kinetic::TurnKernel::von_mises(2, cfg.kernel.kappa.unwrap_or(1.0))?
            }
            other => return Err(Error::Config(format!("unknown kernel type {other:?}"))),
        }
    };
    let params = crate::kinetic::ModelParams::derive_with_override(
        cfg.alpha,
        cfg.tau0,
        cfg.tau1,
        cfg.c0,
        cfg.epsilon,
        &kernel,
        cfg.c_alpha,
    )?;
    let field = cfg.build_field()?;
    let grad_rho_wall = field.grad_rho([0.0, 0.0]);
    let ords = OrdinateSet::circle(cfg.milne.ordinates)?;
    let grid = HalfSpaceGrid::graded(
        cfg.milne.r_max,
        cfg.milne.first_spacing,
        cfg.milne.grading,
    )?;
    let op = TransportOperator::build(&params, &kernel, ords, grid, grad_rho_wall)?;
    let albedo = extract_albedo(&op)?;
    let theta = theta_nullspace(op.ordinates(), &albedo, &PromptKernel::Specular)?;
    let (a0, _l0) = recover_a0(1.0, &theta, &albedo);
    let h = boundary_operator_h(&params, op.ordinates(), &PromptKernel::Specular, grad_rho_wall)?;

    // Flux-moment profile for a smooth reference inflow 1 + μ.
    let inflow: Vec<f64> = op
        .ordinates()
        .incoming()
        .iter()
        .map(|&j| 1.0 + op.ordinates().mu()[j])
        .collect();
    let sol = solve_halfspace(&op, &inflow, None)?;
    let moments = flux_moment(&op, &sol);

    let mut w_ds = Dataset::new("w", &["mu", "weight", "w"]);
    for (a, &j) in op.ordinates().incoming().iter().enumerate() {
        w_ds.push(vec![
            op.ordinates().mu()[j],
            op.ordinates().weights()[j],
            albedo.w[a],
        ])?;
    }
    let mut g_ds = Dataset::new("g", &["mu_in", "mu_out", "g0"]);
    for (a, &j_in) in op.ordinates().incoming().iter().enumerate() {
        for (b, &j_out) in op.ordinates().outgoing().iter().enumerate() {
            g_ds.push(vec![
                op.ordinates().mu()[j_in],
                op.ordinates().mu()[j_out],
                albedo.g0[(a, b)],
            ])?;
        }
    }
    let mut th_ds = Dataset::new("theta", &["mu", "theta"]);
    for (a, &j) in op.ordinates().incoming().iter().enumerate() {
        th_ds.push(vec![op.ordinates().mu()[j], theta.theta[a]])?;
    }
    let mut fm_ds = Dataset::new("flux_moment", &["r", "moment"]);
    for (i, &r) in op.grid().nodes().iter().enumerate() {
        fm_ds.push(vec![r, moments[i]])?;
    }

    let r1 = reflection_r(&albedo, &vec![1.0; albedo.w.len()])?;
    let r1_spread = r1
        .iter()
        .map(|v| (v - 1.0).abs())
        .fold(0.0f64, f64::max);
    let moment_spread = moments.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b))
        - moments.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    let report = json!({
        "w_total": albedo.w_total(),
        "g_column_max": albedo.g_column_totals().iter().fold(0.0f64, |a, b| a.max(b.abs())),
        "r_of_one_max_deviation": r1_spread,
        "theta_residual": theta.residual,
        "theta_sigma_min": theta.sigma_min,
        "theta_sigma_second": theta.sigma_second,
        "a0_for_unit_u0": a0,
        "h_advective": h.advective,
        "h_fractional": h.fractional,
        "h_quadrature_error": h.quad_error,
        "far_field_reference_inflow": sol.far_field,
        "tail_exponent": sol.tail_exponent,
        "flux_moment_spread": moment_spread,
    });

    let mut files = Vec::new();
    for ds in [&w_ds, &g_ds, &th_ds, &fm_ds] {
        files.push(emit_dataset(ds, dir, cfg, cfg.seed)?);
    }
    files.push(emit_report(
        "milne",
        &serde_json::to_string_pretty(&report).unwrap(),
        dir,
    )?);
    Ok(RunOutput { files })
}

/// Matched micro/macro pair over an ε sweep: the L¹ density distance at the
/// snapshot times and the boundary-strip mass-matching residual, per ε.
fn run_match(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let geom = cfg.build_geometry()?;
    let length = match geom {
        DomainGeometry::Interval { length } => length,
        _ => {
            return Err(Error::Config(
                "the match pipeline runs on interval geometry".into(),
            ))
        }
    };
    let field = cfg.build_field()?;
    let kernel = cfg.build_kernel()?;
    let epsilons = cfg
        .epsilons
        .clone()
        .unwrap_or_else(|| vec![cfg.epsilon]);
    let snaps = cfg.snapshot_times();
    if snaps.len() < 3 {
        return Err(Error::Config(
            "the match pipeline needs at least 3 snapshot times".into(),
        ));
    }

    let mut ds = Dataset::new("match", &["epsilon", "time", "l1"]);
    let mut summary = Vec::new();
    for &eps in &epsilons {
        let params = crate::kinetic::ModelParams::derive_with_override(
            cfg.alpha, cfg.tau0, cfg.tau1, cfg.c0, eps, &kernel, cfg.c_alpha,
        )?;
        let ens = EnsembleConfig {
            n_particles: cfg.particles,
            horizon: cfg.horizon,
            snapshot_times: snaps.clone(),
            bins: cfg.n_cells,
            seed: cfg.seed,
            start: None,
            workers: worker_cap(),
        };
        let hists = simulate_ensemble(&ens, &params, &geom, &field, &kernel)?;

        let grid = Grid1D::new(cfg.n_cells, length)?;
        let solver = MacroSolver::new(grid, params, &field)?;
        let mut u0v = vec![0.0; cfg.n_cells];
        u0v[cfg.n_cells / 2] = 1.0 / solver.grid().spacing();
        let u0 = ScalarField::new(u0v, 0.0);
        let opts = SolveOptions {
            scheme: Scheme::ImexDiffusion,
            dt: None,
        };
        let pde = solver.solve(&u0, cfg.horizon, &snaps, &opts)?;

        // Mean free path sets the default boundary-strip width.
        let mean_run = eps.powf(1.0 + params.mu) * params.tau0 / (params.alpha - 1.0);
        let speed = params.c0 * eps.powf(-0.5);
        let strip = cfg.strip_width.unwrap_or(5.0 * mean_run * speed);

        let h = solver.grid().spacing();
        let mut l1_mean = 0.0;
        let mut interior_series = Vec::new();
        let mut layer_series = Vec::new();
        for (hist, u) in hists.iter().zip(&pde) {
            let d = hist.density();
            let l1: f64 = (0..cfg.n_cells)
                .map(|i| (d[i] - u.values[i]).abs() * h)
                .sum();
            ds.push(vec![eps, u.time, l1])?;
            l1_mean += l1 / snaps.len() as f64;
            // Layer mass: micro-macro difference inside the wall strips.
            let mut diff_mass = 0.0;
            for i in 0..cfg.n_cells {
                let x = solver.grid().center(i);
                if x < strip || x > length - strip {
                    diff_mass += (d[i] - u.values[i]) * h;
                }
            }
            interior_series.push((u.time, total_mass(solver.grid(), u)));
            layer_series.push((u.time, diff_mass));
        }
        let residual = matching_residual(&interior_series, &layer_series)?;
        summary.push(json!({
            "epsilon": eps,
            "l1_mean": l1_mean,
            "matching_residual": residual,
            "strip_width": strip,
        }));
    }
    let mut files = vec![emit_dataset(&ds, dir, cfg, cfg.seed)?];
    files.push(emit_report(
        "match",
        &serde_json::to_string_pretty(&json!({ "sweep": summary })).unwrap(),
        dir,
    )?);
    Ok(RunOutput { files })
}

fn run_curved(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    let radius = cfg
        .geometry
        .as_ref()
        .map(|g| g.extent)
        .unwrap_or(1.0);
    let strip = cfg.strip_width.unwrap_or(0.25 * radius);
    // Radially constant and generic smooth test fields.
    let w_const = |_d: f64, _phi: f64| 1.0;
    let dw_const = |_d: f64, _phi: f64| 0.0;
    let w_gen = move |d: f64, phi: f64| (-2.0 * d / strip).exp() * (1.0 + 0.3 * (2.0 * phi).cos());
    let dw_gen = move |d: f64, phi: f64| {
        -2.0 / strip * (-2.0 * d / strip).exp() * (1.0 + 0.3 * (2.0 * phi).cos())
    };

    let mut ds = Dataset::new("curved", &["n_quad", "residual_constant", "residual_generic"]);
    let mut generic = Vec::new();
    for &n in &[32usize, 64, 128, 256] {
        let rc = curved_conservation_check(&w_const, &dw_const, strip, radius, n)?;
        let rg = curved_conservation_check(&w_gen, &dw_gen, strip, radius, n)?;
        ds.push(vec![n as f64, rc, rg])?;
        generic.push(rg);
    }
    let slope = (generic[0] / generic[generic.len() - 1]).log2()
        / (generic.len() as f64 - 1.0);
    let flat = curved_conservation_check(&w_gen, &dw_gen, strip, 1e8_f64.max(radius), 2048)?;
    let report = json!({
        "refinement_slope": slope,
        "flat_limit_residual": flat,
        "strip_width": strip,
        "radius": radius,
    });
    let mut files = vec![emit_dataset(&ds, dir, cfg, cfg.seed)?];
    files.push(emit_report(
        "curved",
        &serde_json::to_string_pretty(&report).unwrap(),
        dir,
    )?);
    Ok(RunOutput { files })
}
