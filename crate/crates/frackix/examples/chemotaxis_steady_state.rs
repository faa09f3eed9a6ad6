//! Macroscopic chemotaxis on an interval: at α = 2 the zero-flux steady
//! state is the classical profile u ∝ exp(χρ/C₂); at α < 2 long jumps
//! flatten the aggregate and deposit a small wall layer.
//!
//! Run with `cargo run --release --example chemotaxis_steady_state`.

use frackix::kinetic::{ChemicalField, ModelParams, TurnKernel};
use frackix::macro_solver::{total_mass, Grid1D, MacroSolver, ScalarField, Scheme, SolveOptions};

fn main() -> frackix::Result<()> {
    let n = 256;
    let field = ChemicalField::gaussian(1.0, [0.5, 0.0], 0.2);
    let kernel = TurnKernel::uniform(1)?;
    let opts = SolveOptions {
        scheme: Scheme::ImexDiffusion,
        dt: None,
    };

    for (label, alpha, c_alpha) in [
        ("classical (alpha = 2)", 2.0, Some(0.05)),
        ("fractional (alpha = 1.5)", 1.5, None),
    ] {
        let params = ModelParams::derive_with_override(alpha, 1.0, 0.02, 1.0, 0.25, &kernel, c_alpha)?;
        let grid = Grid1D::new(n, 1.0)?;
        let solver = MacroSolver::new(grid, params, &field)?;
        let u0 = ScalarField::new(vec![1.0; n], 0.0);
        let out = solver.solve(&u0, 40.0, &[40.0], &opts)?;
        let u = &out[0];
        let mass = total_mass(solver.grid(), u);

        if alpha == 2.0 {
            // Compare against the analytic Boltzmann profile.
            let c2 = params.c_alpha;
            let mut exact: Vec<f64> = (0..n)
                .map(|i| (params.chi * field.rho([solver.grid().center(i), 0.0]) / c2).exp())
                .collect();
            let z = solver.grid().spacing() * exact.iter().sum::<f64>();
            exact.iter_mut().for_each(|v| *v /= z);
            let l1: f64 = (0..n)
                .map(|i| (u.values[i] / mass - exact[i]).abs() * solver.grid().spacing())
                .sum();
            println!("{label}: L1(steady state, exp(chi rho / C2)) = {l1:.2e}");
        }
        let peak = u
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        println!(
            "{label}: mass {mass:.12}, peak u = {:.4} at x = {:.3}, wall u = ({:.4}, {:.4})\n",
            peak.1,
            solver.grid().center(peak.0),
            u.values[0],
            u.values[n - 1],
        );
    }
    Ok(())
}
