//! The macroscopic boundary operator H and the first-order layer flux w₁:
//! the pieces that turn the half-space analysis into a usable boundary
//! condition for the interior equation.
//!
//! Run with `cargo run --release --example boundary_condition`.

use frackix::kinetic::{ModelParams, TurnKernel};
use frackix::layer::{boundary_flux_w1, boundary_operator_h, HalfSpaceGrid, OrdinateSet, PromptKernel};

fn main() -> frackix::Result<()> {
    let kernel = TurnKernel::uniform(2)?;
    let ords = OrdinateSet::circle(32)?;
    let grad_rho_wall = [-0.8, 0.0];

    println!("H coefficients (advective, fractional) for specular prompt reflection:\n");
    println!(
        "{:>7} {:>7} {:>14} {:>14} {:>12}",
        "alpha", "tau1", "advective", "fractional", "quad error"
    );
    for (alpha, tau1) in [(1.3, 0.0), (1.3, 0.5), (1.7, 0.5), (1.9, 0.5)] {
        let params = ModelParams::derive(alpha, 1.0, tau1, 1.0, 0.1, &kernel)?;
        let h = boundary_operator_h(&params, &ords, &PromptKernel::Specular, grad_rho_wall)?;
        println!(
            "{alpha:>7} {tau1:>7} {:>14.8} {:>14.8} {:>12.2e}",
            h.advective, h.fractional, h.quad_error
        );
    }

    // First-order layer flux for an exponential boundary profile.
    let params = ModelParams::derive(1.5, 1.0, 0.0, 1.0, 0.1, &kernel)?;
    let grid = HalfSpaceGrid::graded(40.0, 0.05, 1.2)?;
    let u0b: Vec<f64> = grid.nodes().iter().map(|r| (-r).exp()).collect();
    let w1 = boundary_flux_w1(&u0b, &params, &grid)?;
    println!("\nw1 profile for u0_b = exp(-r) (first nodes):");
    for (r, w) in grid.nodes().iter().zip(&w1).take(6) {
        println!("  r = {r:>8.4}: w1 = {w:>12.6}");
    }
    let const_profile = vec![2.0; grid.nodes().len()];
    let w1c = boundary_flux_w1(&const_profile, &params, &grid)?;
    println!(
        "constant profile: max |w1| = {:.2e} (radial derivatives vanish)",
        w1c.iter().fold(0.0f64, |a, b| a.max(b.abs()))
    );
    Ok(())
}
