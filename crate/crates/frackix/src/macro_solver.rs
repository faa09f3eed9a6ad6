//! Conservative finite-volume integration of the macroscopic equation
//!
//!   du/dt = n c0 d/dx ( C_alpha grad^(alpha-1) u  -  chi u drho/dx )
//!
//! on an interval with zero-flux walls. Faces carry the full flux; boundary
//! faces carry exactly zero, so mass conservation is a telescoping identity.

use crate::error::{Error, Result};
use crate::fracops::{build_reflecting_divgrad_matrix, face_gradient_rows, FracOperatorMatrix};
use crate::kinetic::{ChemicalField, ModelParams};
use crate::util::kahan_sum;
use nalgebra::{DMatrix, DVector};

/// Uniform cell grid on [0, L].
#[derive(Debug, Clone)]
pub struct Grid1D {
    n: usize,
    h: f64,
    length: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::Config(format!("grid needs at least 4 cells, got {n}")));
        }
        if !(length > 0.0) {
            return Err(Error::Config(format!("domain length must be > 0, got {length}")));
        }
        Ok(Grid1D {
            n,
            h: length / n as f64,
            length,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.center(i)).collect()
    }

    pub fn face(&self, i: usize) -> f64 {
        i as f64 * self.h
    }
}

/// Cell-centered scalar field with a time stamp.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub values: Vec<f64>,
    pub time: f64,
}

impl ScalarField {
    pub fn new(values: Vec<f64>, time: f64) -> Self {
        ScalarField { values, time }
    }
}

/// Total mass h·Σ u_i.
pub fn total_mass(grid: &Grid1D, u: &ScalarField) -> f64 {
    grid.h * kahan_sum(u.values.iter().copied())
}

/// Time-stepping scheme for [`MacroSolver::solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Explicit Euler, bounded by [`MacroSolver::stable_dt`].
    Explicit,
    /// Implicit (LU) treatment of the fractional diffusion, explicit upwind
    /// advection; bounded by the advective CFL only.
    ImexDiffusion,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub scheme: Scheme,
    /// Optional explicit time step; defaults to the scheme's stability bound.
    pub dt: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            scheme: Scheme::Explicit,
            dt: None,
        }
    }
}

/// Discrete operators and face data used by the solver.
pub struct MacroSolver {
    grid: Grid1D,
    params: ModelParams,
    /// Symmetric fractional face gradient, rows = N+1 faces, scaled by h^(1-α).
    face_grad: Vec<Vec<f64>>,
    /// Divergence-form matrix (for the stability bound and implicit stepping).
    divgrad: FracOperatorMatrix,
    /// Exact d(rho)/dx at the faces.
    rho_face_grad: Vec<f64>,
}

impl MacroSolver {
    pub fn new(grid: Grid1D, params: ModelParams, field: &ChemicalField) -> Result<Self> {
        let beta = params.alpha - 1.0;
        let scale = grid.h.powf(-beta);
        let mut face_grad = face_gradient_rows(params.alpha, grid.n, true)?;
        for row in face_grad.iter_mut() {
            for v in row.iter_mut() {
                *v *= scale;
            }
        }
        let divgrad = build_reflecting_divgrad_matrix(params.alpha, grid.n, grid.h)?;
        let rho_face_grad = (0..=grid.n)
            .map(|i| field.grad_rho([grid.face(i), 0.0])[0])
            .collect();
        Ok(MacroSolver {
            grid,
            params,
            face_grad,
            divgrad,
            rho_face_grad,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn divgrad(&self) -> &FracOperatorMatrix {
        &self.divgrad
    }

    /// Per-face fluxes F_i = C_α (grad^(α-1) u)_i − χ u_up (dρ/dx)_i for the
    /// interior faces; the two wall faces are exactly zero.
    pub fn face_flux(&self, u: &ScalarField) -> Result<Vec<f64>> {
        let n = self.grid.n;
        if u.values.len() != n {
            return Err(Error::Argument(format!(
                "face_flux: field has {} cells, grid has {n}",
                u.values.len()
            )));
        }
        let chi = self.params.chi;
        let mut flux = vec![0.0f64; n + 1];
        for i in 1..n {
            let mut grad = 0.0;
            let row = &self.face_grad[i];
            for (j, w) in row.iter().enumerate() {
                grad += w * u.values[j];
            }
            let drho = self.rho_face_grad[i];
            // Upwind the advected cell value by the sign of chi * drho/dx.
            let upwind = if chi * drho > 0.0 {
                u.values[i - 1]
            } else {
                u.values[i]
            };
            flux[i] = self.params.c_alpha * grad - chi * upwind * drho;
        }
        Ok(flux)
    }

    /// Largest admissible explicit step: half the inverse Gershgorin radius of
    /// the scaled diffusion operator, capped by the advective CFL.
    pub fn stable_dt(&self) -> f64 {
        let nf = self.params.dimension as f64;
        let scale = nf * self.params.c0 * self.params.c_alpha.abs();
        let mut radius = 0.0f64;
        for m in 0..self.grid.n {
            let row_sum: f64 = (0..self.grid.n)
                .map(|j| self.divgrad.matrix()[(m, j)].abs())
                .sum();
            radius = radius.max(row_sum);
        }
        let diffusion = if scale * radius > 0.0 {
            1.0 / (scale * radius)
        } else {
            f64::INFINITY
        };
        let max_drho = self
            .rho_face_grad
            .iter()
            .fold(0.0f64, |a, b| a.max(b.abs()));
        let adv_speed = nf * self.params.c0 * self.params.chi.abs() * max_drho;
        let advective = if adv_speed > 0.0 {
            self.grid.h / adv_speed
        } else {
            f64::INFINITY
        };
        0.5 * diffusion.min(advective)
    }

    /// One explicit Euler step; rejects dt above the stability bound.
    pub fn step(&self, u: &ScalarField, dt: f64) -> Result<ScalarField> {
        let bound = self.stable_dt();
        if dt > bound * (1.0 + 1e-12) {
            return Err(Error::Stability(format!(
                "dt = {dt} exceeds the stable step {bound}"
            )));
        }
        let flux = self.face_flux(u)?;
        let nf = self.params.dimension as f64;
        let factor = dt * nf * self.params.c0 / self.grid.h;
        let values = (0..self.grid.n)
            .map(|i| u.values[i] + factor * (flux[i + 1] - flux[i]))
            .collect();
        Ok(ScalarField {
            values,
            time: u.time + dt,
        })
    }

    /// Advance to each requested snapshot time and return the trajectory.
    pub fn solve(
        &self,
        u0: &ScalarField,
        horizon: f64,
        snapshot_times: &[f64],
        opts: &SolveOptions,
    ) -> Result<Vec<ScalarField>> {
        if snapshot_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("snapshot times must be ascending".into()));
        }
        if snapshot_times.iter().any(|&t| t < u0.time || t > horizon) {
            return Err(Error::Config(
                "snapshot times must lie within [start, horizon]".into(),
            ));
        }
        let dt_base = match opts.scheme {
            Scheme::Explicit => opts.dt.unwrap_or(self.stable_dt()),
            Scheme::ImexDiffusion => {
                // Only the advective CFL binds; keep some accuracy margin.
                let adv = {
                    let nf = self.params.dimension as f64;
                    let max_drho = self
                        .rho_face_grad
                        .iter()
                        .fold(0.0f64, |a, b| a.max(b.abs()));
                    let speed = nf * self.params.c0 * self.params.chi.abs() * max_drho;
                    if speed > 0.0 {
                        0.5 * self.grid.h / speed
                    } else {
                        (horizon - u0.time).max(1e-12) / 64.0
                    }
                };
                opts.dt.unwrap_or(adv)
            }
        };
        if !(dt_base > 0.0) {
            return Err(Error::Config(format!(
                "time step must be > 0, got {dt_base}"
            )));
        }

        let mut lu: Option<(f64, nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>)> = None;
        let mut u = u0.clone();
        let mut out = Vec::with_capacity(snapshot_times.len());
        for &target in snapshot_times {
            while u.time < target - 1e-14 {
                let dt = dt_base.min(target - u.time);
                u = match opts.scheme {
                    Scheme::Explicit => self.step(&u, dt)?,
                    Scheme::ImexDiffusion => {
                        let needs_new = match &lu {
                            Some((d, _)) => (d - dt).abs() > 1e-15 * dt,
                            None => true,
                        };
                        if needs_new {
                            lu = Some((dt, self.imex_factorization(dt)?));
                        }
                        self.step_imex(&u, dt, &lu.as_ref().unwrap().1)?
                    }
                };
            }
            u.time = target;
            out.push(u.clone());
        }
        Ok(out)
    }

    fn imex_factorization(
        &self,
        dt: f64,
    ) -> Result<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
        let n = self.grid.n;
        let nf = self.params.dimension as f64;
        let k = dt * nf * self.params.c0 * self.params.c_alpha;
        let mut m = DMatrix::<f64>::identity(n, n);
        m -= self.divgrad.matrix() * k;
        Ok(m.lu())
    }

    fn step_imex(
        &self,
        u: &ScalarField,
        dt: f64,
        lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    ) -> Result<ScalarField> {
        let n = self.grid.n;
        let chi = self.params.chi;
        let nf = self.params.dimension as f64;
        let factor = dt * nf * self.params.c0 / self.grid.h;
        // Explicit upwind advective fluxes (zero at the walls).
        let mut adv = vec![0.0f64; n + 1];
        for i in 1..n {
            let drho = self.rho_face_grad[i];
            let upwind = if chi * drho > 0.0 {
                u.values[i - 1]
            } else {
                u.values[i]
            };
            adv[i] = -chi * upwind * drho;
        }
        let rhs = DVector::from_iterator(
            n,
            (0..n).map(|i| u.values[i] + factor * (adv[i + 1] - adv[i])),
        );
        let sol = lu.solve(&rhs).ok_or_else(|| {
            Error::Numerical("imex solve failed (singular diffusion matrix)".into())
        })?;
        Ok(ScalarField {
            values: sol.iter().copied().collect(),
            time: u.time + dt,
        })
    }
}
