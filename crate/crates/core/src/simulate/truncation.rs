//! Simulation disk radius with explicit missed-mass accounting.
//!
//! Stations beyond radius `R` contribute in expectation
//!
//! ```text
//! M(R) = Σ_k λ_k π E[((s_max S̃_k)^{2/β_k} - R²)⁺]
//! ```
//!
//! propagation points to the window `(0, s_max]`. The radius is the smallest
//! `R` (to relative precision 1e-6) with `M(R) ≤ ε`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::model::{MarkLaw, NetworkModel, ScalarDistribution, TierSpec};
use crate::moments::breakpoints;
use crate::specfun::{quad_points, QuadOptions};
use crate::{Error, Result};

/// Default upper bound on the search.
pub const DEFAULT_RADIUS_CAP: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub radius: f64,
    /// Expected number of in-window points generated outside the disk.
    pub missed_mass: f64,
}

pub fn truncation_radius(model: &NetworkModel, s_max: f64, epsilon: f64, cap: f64) -> Result<Truncation> {
    if !(s_max > 0.0) || !(epsilon > 0.0) || !(cap > 0.0) {
        return Err(Error::Invalid("s_max, epsilon and the radius cap must be positive".into()));
    }
    let reach = deterministic_reach(model, s_max);
    if reach.is_finite() {
        if reach <= cap {
            return Ok(Truncation { radius: reach, missed_mass: 0.0 });
        }
        let achievable = missed_mass(model, s_max, cap, epsilon)?;
        return Err(Error::Infeasible { cap, achievable, epsilon });
    }

    let at_cap = missed_mass(model, s_max, cap, epsilon)?;
    if at_cap > epsilon {
        return Err(Error::Infeasible { cap, achievable: at_cap, epsilon });
    }
    // Halve down from the cap to bracket, then bisect.
    let mut hi = cap;
    let mut hi_mass = at_cap;
    let mut lo = 0.0;
    loop {
        let mid = 0.5 * hi;
        if mid < 1e-300 {
            break;
        }
        let m = missed_mass(model, s_max, mid, epsilon)?;
        if m <= epsilon {
            hi = mid;
            hi_mass = m;
        } else {
            lo = mid;
            break;
        }
    }
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        let m = missed_mass(model, s_max, mid, epsilon)?;
        if m <= epsilon {
            hi = mid;
            hi_mass = m;
        } else {
            lo = mid;
        }
    }
    Ok(Truncation { radius: hi, missed_mass: hi_mass })
}

/// Largest `(s_max S̃)^{1/β}` over the support, or `+∞` when `S̃` is unbounded.
pub fn deterministic_reach(model: &NetworkModel, s_max: f64) -> f64 {
    let mut reach: f64 = 0.0;
    for tier in model.tiers() {
        match &tier.marks {
            MarkLaw::Independent { power, shadowing, pathloss_constant, .. } => {
                let a_min = pathloss_constant.support_min();
                let top = power.support_max() * shadowing.support_max() / a_min;
                if !top.is_finite() {
                    return f64::INFINITY;
                }
                for (beta, _) in tier.beta_atoms() {
                    reach = reach.max((s_max * top).powf(1.0 / beta));
                }
            }
            MarkLaw::Joint(atoms) => {
                for a in atoms.iter().filter(|a| a.probability > 0.0) {
                    reach = reach.max((s_max * a.s_tilde()).powf(1.0 / a.beta));
                }
            }
        }
    }
    reach
}

/// `M(R)`, the expected number of in-window points from stations beyond `radius`.
///
/// `epsilon` only sets the integration tolerance.
pub fn missed_mass(model: &NetworkModel, s_max: f64, radius: f64, epsilon: f64) -> Result<f64> {
    let k = radius * radius;
    let n = model.tiers().len() as f64;
    let mut total = 0.0;
    for tier in model.tiers() {
        let tol = 1e-4 * epsilon / (PI * tier.lambda * n);
        total += PI * tier.lambda * tier_excess(tier, s_max, k, tol)?;
    }
    Ok(total)
}

/// `E[((s_max S̃)^{2/β} - K)⁺]` for one tier.
fn tier_excess(tier: &TierSpec, s_max: f64, k: f64, tol: f64) -> Result<f64> {
    match &tier.marks {
        MarkLaw::Independent { power, shadowing, pathloss_constant, .. } => {
            // Atom-valued factors outside, continuous ones inside.
            let mut factors: Vec<(&ScalarDistribution, f64)> =
                alloc::vec![(power, 1.0), (shadowing, 1.0), (pathloss_constant, -1.0)];
            factors.sort_by_key(|(d, _)| d.atoms().is_none());
            let mut total = 0.0;
            for (beta, p) in tier.beta_atoms() {
                let q = 2.0 / beta;
                total += p * excess(&factors, q, s_max.powf(q), k, tol)?;
            }
            Ok(total)
        }
        MarkLaw::Joint(atoms) => Ok(atoms
            .iter()
            .map(|a| a.probability * ((s_max * a.s_tilde()).powf(2.0 / a.beta) - k).max(0.0))
            .sum()),
    }
}

/// `E[(scale · Π F_i^{sign_i q} - K)⁺]` over independent factors.
fn excess(factors: &[(&ScalarDistribution, f64)], q: f64, scale: f64, k: f64, tol: f64) -> Result<f64> {
    let Some(((dist, sign), rest)) = factors.split_first() else {
        return Ok((scale - k).max(0.0));
    };
    let power = sign * q;
    if let Some(atoms) = dist.atoms() {
        let mut total = 0.0;
        for (v, p) in atoms {
            total += p * excess(rest, q, scale * v.powf(power), k, tol)?;
        }
        return Ok(total);
    }
    let opts = QuadOptions { abs_tol: tol, rel_tol: 1e-10, max_intervals: 20_000 };
    let pdf = |x: f64| dist.pdf(x).unwrap_or(0.0);
    if !rest.is_empty() {
        let points = breakpoints(dist, power.max(0.0));
        let inner = |x: f64| {
            if x <= 0.0 {
                return 0.0;
            }
            let w = pdf(x);
            if w == 0.0 {
                return 0.0;
            }
            w * excess(rest, q, scale * x.powf(power), k, tol).unwrap_or(f64::NAN)
        };
        return quad_points(inner, &points, opts);
    }
    // Innermost continuous factor: integrate only where the excess is positive.
    let threshold = (k / scale).powf(1.0 / power);
    let integrand = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        ((scale * x.powf(power) - k) * pdf(x)).max(0.0)
    };
    let mut points: Vec<f64> = breakpoints(dist, power.max(0.0));
    if power > 0.0 {
        points.retain(|&x| x > threshold);
        points.insert(0, threshold);
    } else {
        points.retain(|&x| x < threshold);
        points.push(threshold);
    }
    if points.len() < 2 {
        return Ok(0.0);
    }
    quad_points(integrand, &points, opts)
}
