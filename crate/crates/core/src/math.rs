//! Factorial-type helpers used by the closed-form density formulas.

/// ln(k!), summed directly. Arguments here are degrees and edge counts, so
/// the linear cost is irrelevant next to exactness for small k.
pub fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// ln of the rising factorial x(x+1)...(x+len-1).
pub fn ln_rising(x: u64, len: u64) -> f64 {
    (0..len).map(|t| ((x + t) as f64).ln()).sum()
}

/// Falling factorial (x)_len = x(x-1)...(x-len+1); zero when len > x.
pub fn falling(x: u64, len: u64) -> u128 {
    if len > x {
        return 0;
    }
    (0..len).fold(1u128, |acc, t| acc * (x - t) as u128)
}

pub fn falling_f64(x: u64, len: u64) -> f64 {
    if len > x {
        return 0.0;
    }
    (0..len).map(|t| (x - t) as f64).product()
}

pub fn factorial_f64(k: u64) -> f64 {
    (2..=k).map(|i| i as f64).product()
}
