//! Standard normal pdf, cdf, and quantile.
//!
//! The quantile is an Abramowitz–Stegun 26.2.23 rational initial guess
//! polished by two Newton steps on the cdf, giving absolute error below
//! 1e-11 across (0, 1). It is pure arithmetic on `f64`, so sampling built
//! on it reproduces bit-for-bit across platforms.

pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

// exp and log go through libm (pure Rust) rather than the platform
// intrinsics, so every value this module produces is bit-identical
// across platforms; sqrt is IEEE-exact everywhere.

pub fn std_normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / SQRT_2PI
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Inverse of [`std_normal_cdf`]. Returns NaN outside (0, 1).
pub fn std_normal_quantile(p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return f64::NAN;
    }
    if p > 0.5 {
        -lower_quantile(1.0 - p)
    } else {
        lower_quantile(p)
    }
}

// p in (0, 0.5]; returns the (nonpositive) lower-tail quantile.
fn lower_quantile(p: f64) -> f64 {
    let t = (-2.0 * libm::log(p)).sqrt();
    let mut x = -(t
        - (2.515517 + t * (0.802853 + t * 0.010328))
            / (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))));
    for _ in 0..2 {
        x -= (std_normal_cdf(x) - p) / std_normal_pdf(x);
    }
    x
}
