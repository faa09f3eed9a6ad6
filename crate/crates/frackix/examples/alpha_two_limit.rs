//! The α → 2 limit: on a fixed grid with matched constants, the fractional
//! solution converges to the classical one, and the reflecting operator
//! approaches the classical Neumann stencil entrywise.
//!
//! Run with `cargo run --release --example alpha_two_limit`.

use frackix::fracops::build_reflecting_divgrad_matrix;
use frackix::kinetic::{ChemicalField, ModelParams, TurnKernel};
use frackix::macro_solver::{Grid1D, MacroSolver, ScalarField, Scheme, SolveOptions};

fn main() -> frackix::Result<()> {
    let n = 128;
    let c = 0.05;
    let field = ChemicalField::gaussian(1.0, [0.5, 0.0], 0.2);
    let kernel = TurnKernel::uniform(1)?;
    let opts = SolveOptions {
        scheme: Scheme::ImexDiffusion,
        dt: Some(2e-3),
    };
    let run = |alpha: f64| -> frackix::Result<Vec<f64>> {
        let params = ModelParams::derive_with_override(alpha, 1.0, 0.02, 1.0, 0.25, &kernel, Some(c))?;
        let grid = Grid1D::new(n, 1.0)?;
        let solver = MacroSolver::new(grid, params, &field)?;
        let mut u0 = vec![0.0; n];
        u0[n / 2] = n as f64;
        Ok(solver
            .solve(&ScalarField::new(u0, 0.0), 0.4, &[0.4], &opts)?
            .remove(0)
            .values)
    };
    let reference = run(2.0)?;
    println!("L1 gap to the alpha = 2 solution at T = 0.4 (same C, chi, grid):");
    for alpha in [1.9, 1.99, 1.999] {
        let u = run(alpha)?;
        let l1: f64 = u
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs() / n as f64)
            .sum();
        println!("  alpha = {alpha:<6}: {l1:.6}");
    }

    println!("\nmax entry difference of the reflecting operator vs classical Neumann:");
    let classical = build_reflecting_divgrad_matrix(2.0, 32, 1.0)?;
    for alpha in [1.9, 1.99, 1.999] {
        let a = build_reflecting_divgrad_matrix(alpha, 32, 1.0)?;
        let gap = a
            .matrix()
            .iter()
            .zip(classical.matrix().iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        println!("  alpha = {alpha:<6}: {gap:.4}");
    }
    Ok(())
}
