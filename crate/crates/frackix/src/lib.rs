//! Numerical toolbox for velocity-jump processes with heavy-tailed run times,
//! the fractional chemotaxis equation they give rise to, and the half-space
//! boundary-layer machinery that connects the two at reflecting walls.
//!
//! The crate is organised around five building blocks:
//!
//! * [`kinetic`] — turn-angle kernels, sphere quadrature, eigenvalues,
//!   run-time and direction sampling, specular reflection, scaling exponents
//!   and the macroscopic transport constants.
//! * [`mc`] — Monte Carlo simulation of the velocity-jump process on an
//!   interval or a disc, with chemically modulated tumbling.
//! * [`fracops`] — Grünwald–Letnikov fractional gradients and the
//!   conservative reflecting divergence-form operator on a bounded 1D grid.
//! * [`macro_solver`] — finite-volume time integration of
//!   `du/dt = n c0 d/dx (C_alpha grad^(alpha-1) u - chi u drho/dx)`
//!   with zero-flux walls.
//! * [`layer`] — discrete-ordinates half-space transport solver, albedo
//!   decomposition (W, G), reflection operators R and P, the null-space
//!   function Theta, and the macroscopic boundary operator H.
//!
//! Everything is driven either through the library API (see `examples/`) or
//! through the thin `frackix` binary, which dispatches JSON-configured runs
//! and writes CSV datasets with JSON sidecars (see [`config`], [`run`]).

pub mod config;
pub mod dataset;
pub mod error;
pub mod fracops;
pub mod kinetic;
pub mod layer;
pub mod macro_solver;
pub mod mc;
pub mod run;
pub mod special;
pub mod util;

pub use error::{Error, Result};
