//! Small special-function kit: the real gamma function and the reflection
//! value Γ(1-α) that the fractional transport coefficients need.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Lanczos coefficients (g = 7, n = 9), good to ~1e-14 relative on the
/// positive real axis.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Real gamma function via the Lanczos approximation, with reflection for
/// negative arguments. Poles at 0, -1, -2, ... return an error.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma: non-finite argument {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Domain(format!("gamma: pole at {x}")));
    }
    if x < 0.5 {
        // Reflection: Γ(x) Γ(1-x) = π / sin(πx).
        let s = (PI * x).sin();
        if s == 0.0 {
            return Err(Error::Domain(format!("gamma: pole at {x}")));
        }
        return Ok(PI / (s * gamma(1.0 - x)?));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc)
}

/// Natural log of Γ(x) for x > 0, stable for large arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("ln_gamma: need x > 0, got {x}")));
    }
    if x < 12.0 {
        return Ok(gamma(x)?.ln());
    }
    // Stirling series with the first few Bernoulli corrections.
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0;
    Ok((x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series)
}

/// Γ(1-α) for α in (1,2), computed through the reflection identity
/// Γ(1-α) = π / (sin(πα) Γ(α)). Negative on the whole interval.
pub fn gamma_reflection(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!(
            "gamma_reflection: alpha must lie strictly in (1,2), got {alpha}"
        )));
    }
    let s = (PI * alpha).sin();
    Ok(PI / (s * gamma(alpha)?))
}
