//! Normal distribution and gamma function.
//!
//! Both are thin wrappers over the correctly-rounded-ish `libm` kernels
//! (`erfc`, `tgamma`), which keep about 15 significant digits. The
//! Bachelier/Black-Scholes gap checks subtract prices of similar size, so
//! table-based approximations are not good enough here.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * PI)
}

/// Gamma function on the positive half-line.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("gamma argument", x));
    }
    Ok(libm::tgamma(x))
}
