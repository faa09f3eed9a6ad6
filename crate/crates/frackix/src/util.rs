//! Tiny numeric helpers shared across modules.

/// Compensated (Kahan) summation; used wherever an invariant is checked at
/// 1e-12 or tighter on sums with thousands of terms.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

pub fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn norm2(a: [f64; 2]) -> f64 {
    dot2(a, a).sqrt()
}

/// Angle in [0, π] between two unit vectors.
pub fn angle_between(a: [f64; 2], b: [f64; 2]) -> f64 {
    dot2(a, b).clamp(-1.0, 1.0).acos()
}

/// SplitMix64 finalizer; used to derive independent per-particle streams
/// from a master seed.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
