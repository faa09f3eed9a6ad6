//! Conservation identity on a curved (disc) boundary strip: the flux of the
//! normal field through the strip edges equals the strip integral of the
//! curvature term plus the radial derivative, and the identity degenerates
//! to the flat half-space version as the curvature vanishes.
//!
//! Run with `cargo run --release --example curved_strip`.

use frackix::layer::curved_conservation_check;

fn main() -> frackix::Result<()> {
    let strip = 0.3;
    let w = |d: f64, phi: f64| (-4.0 * d).exp() * (1.0 + 0.4 * (3.0 * phi).sin()) + 0.1;
    let dw = |d: f64, phi: f64| -4.0 * (-4.0 * d).exp() * (1.0 + 0.4 * (3.0 * phi).sin());

    println!("disc of radius 1, strip width {strip}:");
    println!("{:>8} {:>14}", "n_quad", "residual");
    let mut last = None;
    for n in [32usize, 64, 128, 256, 512] {
        let r = curved_conservation_check(&w, &dw, strip, 1.0, n)?;
        let slope = last.map(|p: f64| (p / r).log2());
        match slope {
            Some(s) => println!("{n:>8} {r:>14.3e}   (order {s:.2})"),
            None => println!("{n:>8} {r:>14.3e}"),
        }
        last = Some(r);
    }

    let flat = curved_conservation_check(&w, &dw, strip, 1e8, 2048)?;
    println!("\nflat limit (radius 1e8): residual {flat:.3e}");
    let constant = curved_conservation_check(&|_, _| 2.0, &|_, _| 0.0, strip, 1.0, 64)?;
    println!("radially constant field: residual {constant:.3e} (pure curvature term)");
    Ok(())
}
