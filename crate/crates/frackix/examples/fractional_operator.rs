//! The reflecting divergence-form fractional operator: conservation
//! structure, the exact classical limit at α = 2, and the spectrum.
//!
//! Run with `cargo run --release --example fractional_operator`.

use frackix::fracops::{
    apply_operator, build_frac_gradient_matrix, build_reflecting_divgrad_matrix, grunwald_weights,
    Side,
};

fn main() -> frackix::Result<()> {
    println!("Grünwald weights g_k of order 1/2: {:?}\n", grunwald_weights(0.5, 6)?);

    let n = 48;
    for alpha in [1.3f64, 1.7, 2.0] {
        let a = build_reflecting_divgrad_matrix(alpha, n, 1.0)?;
        let ones = vec![1.0; n];
        let null = apply_operator(&a, &ones)?
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        let col_max = (0..n)
            .map(|j| (0..n).map(|m| a.matrix()[(m, j)]).sum::<f64>().abs())
            .fold(0.0f64, f64::max);
        let eig_max_re = a
            .matrix()
            .clone()
            .complex_eigenvalues()
            .iter()
            .map(|e| e.re)
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "alpha = {alpha}: |A 1|_inf = {null:.2e}, max |column sum| = {col_max:.2e}, max Re(eig) = {eig_max_re:.2e}"
        );
    }

    // At alpha = 2 the operator is exactly the Neumann second difference.
    let a2 = build_reflecting_divgrad_matrix(2.0, 6, 0.5)?;
    println!("\nalpha = 2, h = 0.5, first three rows (classical Neumann stencil / h^2):");
    for m in 0..3 {
        let row: Vec<f64> = (0..6).map(|j| a2.matrix()[(m, j)]).collect();
        println!("  {row:?}");
    }

    // One-sided gradients mirror each other under index reversal.
    let left = build_frac_gradient_matrix(1.5, 6, 1.0, Side::Left)?;
    let right = build_frac_gradient_matrix(1.5, 6, 1.0, Side::Right)?;
    let mut worst = 0.0f64;
    for m in 0..6 {
        for j in 0..6 {
            worst = worst.max((left.matrix()[(m, j)] - right.matrix()[(5 - m, 5 - j)]).abs());
        }
    }
    println!("\nleft/right mirror discrepancy under index reversal: {worst:.2e}");
    Ok(())
}
