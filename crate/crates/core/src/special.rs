//! Scalar special functions used by the closed-form pricing oracles.
//!
//! Thin wrappers over `libm` so the same code paths work with and without
//! `std` (the standard library ships no `erf` or `tgamma` anyway).

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function; keeps full relative accuracy for large `x`
/// where `1 - erf(x)` would cancel to zero.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal cumulative distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Gamma function for real arguments; poles at non-positive integers.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}
