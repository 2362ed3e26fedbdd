use core::f64::consts::PI;
use num_traits::Float;

use crate::{Error, Result};

/// Crossover between the power series and the large-argument expansion.
const CROSSOVER: f64 = 15.0;

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check(x)?;
    if x < CROSSOVER {
        Ok(bessel_i0_series(x))
    } else {
        Ok(bessel_i0_asymptotic(x))
    }
}

/// Exponentially scaled `e^{-x} I₀(x)`; finite for all `x ≥ 0`.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    check(x)?;
    if x < CROSSOVER {
        Ok(bessel_i0_series(x) * (-x).exp())
    } else {
        Ok(asymptotic_sum(x) / (2.0 * PI * x).sqrt())
    }
}

fn check(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain { what: "bessel_i0", value: x });
    }
    Ok(())
}

/// Power series `Σ (x/2)^{2k} / (k!)²`, summed until the terms stop mattering.
pub fn bessel_i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
    }
}

/// Large-argument expansion `e^x / √(2πx) Σ ((2k-1)!!)² / (k! (8x)^k)`,
/// truncated at its smallest term.
pub fn bessel_i0_asymptotic(x: f64) -> f64 {
    x.exp() / (2.0 * PI * x).sqrt() * asymptotic_sum(x)
}

fn asymptotic_sum(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if next >= term || next < sum * 1e-17 {
            return sum;
        }
        term = next;
        sum += term;
        k += 1.0;
    }
}
