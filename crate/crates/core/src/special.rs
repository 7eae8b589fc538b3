//! Thin wrappers over the special functions the numerics need.
//!
//! Backed by `statrs` (Lanczos-type gamma, high-accuracy erf family); the
//! wrappers exist so call sites stay crate-local and the backing can change
//! without touching the numerics.

use statrs::function::erf;
use statrs::function::gamma as sgamma;

/// Gamma function, relative accuracy around 1e-14 on the range used here.
pub fn gamma(x: f64) -> f64 {
    sgamma::gamma(x)
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    sgamma::ln_gamma(x)
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}
