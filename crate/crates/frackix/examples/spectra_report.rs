//! Kernel spectra and macroscopic constants: normalisation, the eigenvalue
//! ν₁ of the turn operator, the scaling exponents, and (C_α, χ).
//!
//! Run with `cargo run --release --example spectra_report`.

use frackix::kinetic::{
    eigenvalue_nu1, kernel_normalization, macro_constants, scaling_exponents, sphere_area,
    SphereQuadrature, TurnKernel, NU1_QUAD_NODES,
};
use frackix::special::gamma_reflection;

fn main() -> frackix::Result<()> {
    let quad = SphereQuadrature::new(2, NU1_QUAD_NODES)?;
    let kernels = [
        ("uniform", TurnKernel::uniform(2)?),
        ("cosine", TurnKernel::cosine(2)?),
        ("vonmises(2.5)", TurnKernel::von_mises(2, 2.5)?),
    ];
    let (alpha, tau0, tau1, c0) = (1.5, 1.0, 0.1, 1.0);
    println!("alpha = {alpha}, tau0 = {tau0}, tau1 = {tau1}, c0 = {c0}");
    println!("|S^1| = {:.12}", sphere_area(2)?);
    println!("Gamma(1 - alpha) = {:.12}", gamma_reflection(alpha)?);
    let (mu, varrho) = scaling_exponents(alpha, 0.5)?;
    println!("mu = {mu}, varrho = {varrho}, varrho - 2 mu = {}", varrho - 2.0 * mu);
    println!();
    println!("{:<14} {:>14} {:>12} {:>12} {:>10}", "kernel", "normalisation", "nu1", "C_alpha", "chi");
    for (name, kernel) in &kernels {
        let norm = kernel_normalization(kernel, &quad)?;
        let nu1 = eigenvalue_nu1(kernel, &quad)?;
        let (c_alpha, chi) = macro_constants(alpha, tau0, tau1, c0, nu1, 2)?;
        println!("{name:<14} {norm:>14.10} {nu1:>12.8} {c_alpha:>12.8} {chi:>10.6}");
    }
    Ok(())
}
