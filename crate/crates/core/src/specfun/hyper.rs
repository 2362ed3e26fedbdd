use num_traits::Float;

use crate::{Error, Result};

const MAX_TERMS: usize = 20_000;

/// Kummer's confluent hypergeometric function `M(a, b, z) = ₁F₁(a; b; z)`.
///
/// Supported for `b > 0` and `|z| ≤ 100`. Negative `z` goes through the Kummer
/// transform `M(a, b, z) = e^z M(b - a, b, -z)` so the summed series has
/// non-negative argument.
pub fn hyp1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Domain { what: "hyp1f1 parameter b", value: b });
    }
    if !a.is_finite() {
        return Err(Error::Domain { what: "hyp1f1 parameter a", value: a });
    }
    if !(z.abs() <= 100.0) {
        return Err(Error::Domain { what: "hyp1f1 argument", value: z });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z < 0.0 {
        Ok(z.exp() * series(b - a, b, -z)?)
    } else {
        series(a, b, z)
    }
}

fn series(a: f64, b: f64, x: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * x / (kf + 1.0);
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // Terms can grow before they shrink; only stop once past the peak.
        if kf > x && term.abs() < 1e-17 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Domain { what: "hyp1f1 series", value: x })
}
