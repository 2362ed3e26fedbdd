//! Special functions and numerical integration.
//!
//! Everything here is a pure function of real arguments; domain violations are
//! reported as [`Error::Domain`](crate::Error::Domain) instead of returning NaN.

mod bessel;
mod gamma;
mod hyper;
mod quad;

pub use bessel::{bessel_i0, bessel_i0_asymptotic, bessel_i0_scaled, bessel_i0_series};
pub use gamma::{gamma, gamma_p, gamma_q, ln_gamma};
pub use hyper::hyp1f1;
pub use quad::{quad, quad_points, QuadOptions};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * core::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal quantile, by bisection on [`normal_cdf`] to full precision.
pub fn normal_quantile(p: f64) -> crate::Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(crate::Error::Domain { what: "normal quantile", value: p });
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
