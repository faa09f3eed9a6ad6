//! Half-space layer solve and its albedo decomposition: far-field weights W,
//! boundary remainder kernel G, the reflection operator identities, the
//! null-space function Θ of (1 - PR), and the recovery a₀ = u₀.
//!
//! Run with `cargo run --release --example milne_albedo`.

use frackix::kinetic::{ModelParams, TurnKernel};
use frackix::layer::{
    extract_albedo, flux_moment, recover_a0, reflection_r, solve_halfspace, theta_nullspace,
    HalfSpaceGrid, OrdinateSet, PromptKernel, TransportOperator,
};
use frackix::util::kahan_sum;

fn main() -> frackix::Result<()> {
    let kernel = TurnKernel::uniform(2)?;
    let params = ModelParams::derive(1.5, 1.0, 0.0, 1.0, 0.1, &kernel)?;
    let ords = OrdinateSet::circle(32)?;
    let grid = HalfSpaceGrid::graded(20_000.0, 0.02, 1.15)?;
    println!(
        "operator: {} ordinates x {} radial nodes (r_max = {})",
        ords.len(),
        grid.nodes().len(),
        grid.r_max()
    );
    let op = TransportOperator::build(&params, &kernel, ords, grid, [0.0, 0.0])?;

    // Constants solve the homogeneous problem.
    let dim = (op.grid().cells() + 1) * op.ordinates().len();
    println!("residual of f = 1: {:.2e}", op.interior_residual(&vec![1.0; dim])?);

    // A rough inflow: the flux moment of the solution is constant in r.
    let n_in = op.ordinates().incoming().len();
    let inflow: Vec<f64> = (0..n_in).map(|a| if a % 2 == 0 { 1.5 } else { 0.2 }).collect();
    let sol = solve_halfspace(&op, &inflow, None)?;
    let j = flux_moment(&op, &sol);
    println!(
        "flux moment: value {:.3e}, spread over r {:.3e}",
        j[0],
        j.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - j.iter().cloned().fold(f64::INFINITY, f64::min)
    );
    println!(
        "far field {:.6} with tail exponent {:.3} (density approaches it algebraically)",
        sol.far_field, sol.tail_exponent
    );

    let albedo = extract_albedo(&op)?;
    println!("\nalbedo: sum W w = {:.12}", albedo.w_total());
    println!(
        "        max |sum_in G w| over outgoing = {:.2e}",
        albedo.g_column_totals().iter().fold(0.0f64, |a, b| a.max(b.abs()))
    );
    let r1 = reflection_r(&albedo, &vec![1.0; n_in])?;
    println!(
        "        max |R(1) - 1| = {:.2e}",
        r1.iter().map(|v| (v - 1.0).abs()).fold(0.0f64, f64::max)
    );

    let theta = theta_nullspace(op.ordinates(), &albedo, &PromptKernel::Specular)?;
    println!(
        "\ntheta:  ||(1 - PR) theta|| = {:.2e}, sigma_min = {:.2e}, next sigma = {:.2e}",
        theta.residual, theta.sigma_min, theta.sigma_second
    );
    println!(
        "        positivity: min theta = {:.6}, normalisation sum W theta w = {:.12}",
        theta.theta.iter().cloned().fold(f64::INFINITY, f64::min),
        kahan_sum(
            theta
                .theta
                .iter()
                .zip(&albedo.w)
                .zip(&albedo.w_in)
                .map(|((t, w), q)| t * w * q)
        )
    );
    let (a0, _) = recover_a0(3.7, &theta, &albedo);
    println!("        a0 recovered for u0 = 3.7: {a0:.12}");
    Ok(())
}
