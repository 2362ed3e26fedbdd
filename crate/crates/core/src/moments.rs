//! Fractional moments `E[Z^q]` of mark distributions.
//!
//! The closed forms generalize the usual `E[S^{2/β}]` table to any order `q`;
//! [`moment_quad`] integrates the densities directly and serves as the
//! independent check.

use alloc::vec::Vec;
use num_traits::Float;

use crate::model::{MarkLaw, ScalarDistribution, TierSpec};
use crate::specfun::{gamma, hyp1f1, ln_gamma, quad_points, QuadOptions};
use crate::{Error, Result};

/// A moment order paired with its distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRequest {
    pub dist: ScalarDistribution,
    pub q: f64,
}

impl MomentRequest {
    pub fn closed(&self) -> Result<f64> {
        moment_closed(&self.dist, self.q)
    }

    pub fn quadrature(&self, tol: f64) -> Result<f64> {
        moment_quad(&self.dist, self.q, tol)
    }
}

/// Closed-form `E[Z^q]`.
///
/// Any real `q` is accepted for constant, discrete and log-normal laws; the
/// other families need `q ≥ 0`.
pub fn moment_closed(dist: &ScalarDistribution, q: f64) -> Result<f64> {
    if !q.is_finite() {
        return Err(Error::Moment { kind: dist.kind(), q, reason: "order must be finite" });
    }
    if q == 0.0 {
        return Ok(1.0);
    }
    if let Some(atoms) = dist.atoms() {
        return Ok(atoms.iter().map(|&(v, p)| p * v.powf(q)).sum());
    }
    if let ScalarDistribution::LogNormal { mu, sigma } = *dist {
        return Ok((q * mu + 0.5 * q * q * sigma * sigma).exp());
    }
    if q < 0.0 {
        return Err(Error::Moment {
            kind: dist.kind(),
            q,
            reason: "negative orders need a constant, discrete or log-normal law",
        });
    }
    let v = match *dist {
        ScalarDistribution::Exponential { rate } => rate.powf(-q) * gamma(q + 1.0)?,
        ScalarDistribution::Weibull { shape, scale } => scale.powf(q) * gamma(q / shape + 1.0)?,
        ScalarDistribution::Nakagami { m, omega } => {
            (ln_gamma(m + 0.5 * q)? - ln_gamma(m)?).exp() * (omega / m).powf(0.5 * q)
        }
        ScalarDistribution::Rice { nu, sigma } => {
            let v2 = 2.0 * sigma * sigma;
            v2.powf(0.5 * q) * gamma(0.5 * q + 1.0)? * hyp1f1(-0.5 * q, 1.0, -nu * nu / v2)?
        }
        _ => unreachable!("atoms and log-normal handled above"),
    };
    Ok(v)
}

/// `∫ s^q f(s) ds` by adaptive quadrature of the density, to relative tolerance `tol`.
pub fn moment_quad(dist: &ScalarDistribution, q: f64, tol: f64) -> Result<f64> {
    if let Some(atoms) = dist.atoms() {
        return Ok(atoms.iter().map(|&(v, p)| p * v.powf(q)).sum());
    }
    let points = breakpoints(dist, q);
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: tol, max_intervals: 20_000 };
    quad_points(|s| if s > 0.0 { s.powf(q) * dist.pdf(s).unwrap_or(0.0) } else { 0.0 }, &points, opts)
}

/// Integration breakpoints bracketing the bulk of `s^q f(s)`, ending at `+∞`.
pub(crate) fn breakpoints(dist: &ScalarDistribution, q: f64) -> Vec<f64> {
    let mut pts = alloc::vec![0.0];
    match *dist {
        ScalarDistribution::LogNormal { mu, sigma } => {
            let centre = mu + q * sigma * sigma;
            for k in -12..=12 {
                pts.push((centre + k as f64 * sigma).exp());
            }
        }
        ScalarDistribution::Rice { nu, sigma } => {
            for k in [0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0] {
                pts.push(k * sigma);
            }
            for k in -8..=12 {
                let s = nu + k as f64 * sigma;
                if s > 0.0 {
                    pts.push(s);
                }
            }
        }
        _ => {
            let scale = match *dist {
                ScalarDistribution::Exponential { rate } => 1.0 / rate,
                ScalarDistribution::Weibull { scale, .. } => scale,
                ScalarDistribution::Nakagami { omega, .. } => omega.sqrt(),
                _ => 1.0,
            };
            for k in [1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
                pts.push(k * scale);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.push(f64::INFINITY);
    pts
}

impl ScalarDistribution {
    /// Closed-form mean.
    pub fn mean(&self) -> Result<f64> {
        moment_closed(self, 1.0)
    }
}

/// `E[S̃^{q(β)}]` for a tier, with `S̃ = P S / A`, summed over the exponent atoms.
///
/// Independent marks factor as `E[P^q] E[S^q] E[A^{-q}]`; joint atoms are summed
/// directly.
pub fn composite_moment<F: Fn(f64) -> f64>(tier: &TierSpec, q_of_beta: F) -> Result<f64> {
    match &tier.marks {
        MarkLaw::Independent { .. } => {
            let mut total = 0.0;
            for (beta, p) in tier.beta_atoms() {
                total += p * independent_s_tilde_moment(tier, q_of_beta(beta))?;
            }
            Ok(total)
        }
        MarkLaw::Joint(atoms) => Ok(atoms
            .iter()
            .map(|a| a.probability * a.s_tilde().powf(q_of_beta(a.beta)))
            .sum()),
    }
}

/// `E[P^q] E[S^q] E[A^{-q}]` for an independent-mark tier.
pub(crate) fn independent_s_tilde_moment(tier: &TierSpec, q: f64) -> Result<f64> {
    let MarkLaw::Independent { power, shadowing, pathloss_constant, .. } = &tier.marks else {
        return Err(Error::Unsupported("factorized moment of a joint mark law"));
    };
    let a = moment_closed(pathloss_constant, -q).map_err(|_| Error::Moment {
        kind: pathloss_constant.kind(),
        q: -q,
        reason: "path-loss constant A must be constant, discrete or log-normal",
    })?;
    Ok(moment_closed(power, q)? * moment_closed(shadowing, q)? * a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sigma_db_to_sigma;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn unit_exponential_first_moment() {
        let d = ScalarDistribution::exponential(1.0).unwrap();
        assert!(rel(moment_closed(&d, 1.0).unwrap(), 1.0) < 1e-14);
    }

    #[test]
    fn mean_one_lognormal_shadowing_factor() {
        let d = ScalarDistribution::lognormal_mean_one_db(5.0).unwrap();
        let beta: f64 = 3.307;
        let sigma = sigma_db_to_sigma(5.0);
        let want = ((sigma * sigma / beta) * (2.0 / beta - 1.0)).exp();
        let got = moment_closed(&d, 2.0 / beta).unwrap();
        assert!(rel(got, want) < 1e-14);
        assert!((got - 0.8535).abs() < 5e-5);
        assert!(rel(moment_quad(&d, 2.0 / beta, 1e-12).unwrap(), got) < 1e-10);
    }

    #[test]
    fn rice_second_moment() {
        for &(nu, s) in &[(0.0, 1.0), (1.5, 0.7), (4.0, 2.0)] {
            let d = ScalarDistribution::rice(nu, s).unwrap();
            let want = 2.0 * s * s + nu * nu;
            assert!(rel(moment_closed(&d, 2.0).unwrap(), want) < 1e-12);
            assert!(rel(moment_quad(&d, 2.0, 1e-12).unwrap(), want) < 1e-10);
        }
    }

    #[test]
    fn constant_and_exponential_quadrature() {
        let c = ScalarDistribution::constant(2.0).unwrap();
        assert_eq!(moment_quad(&c, 3.0, 1e-12).unwrap(), 8.0);
        let e = ScalarDistribution::exponential(2.0).unwrap();
        let want = 2f64.powf(-0.5) * gamma(1.5).unwrap();
        assert!((want - 0.6267).abs() < 1e-4);
        assert!(rel(moment_quad(&e, 0.5, 1e-12).unwrap(), want) < 1e-10);
    }

    #[test]
    fn zero_order_is_one() {
        for d in families() {
            assert_eq!(moment_closed(&d, 0.0).unwrap(), 1.0);
            assert!(rel(moment_quad(&d, 0.0, 1e-12).unwrap(), 1.0) < 1e-10, "{}", d.kind());
        }
    }

    #[test]
    fn negative_orders_only_where_closed() {
        let ln = ScalarDistribution::lognormal(0.2, 0.4).unwrap();
        assert!(moment_closed(&ln, -0.5).is_ok());
        let e = ScalarDistribution::exponential(1.0).unwrap();
        assert!(matches!(moment_closed(&e, -0.5), Err(Error::Moment { .. })));
    }

    #[test]
    fn jensen_direction() {
        for d in families() {
            let mean = d.mean().unwrap();
            for beta in [2.5, 3.0, 4.0] {
                let q = 2.0 / beta;
                assert!(moment_closed(&d, q).unwrap() < mean.powf(q), "{}", d.kind());
            }
        }
    }

    fn families() -> Vec<ScalarDistribution> {
        alloc::vec![
            ScalarDistribution::lognormal(-0.3, 0.8).unwrap(),
            ScalarDistribution::exponential(0.7).unwrap(),
            ScalarDistribution::weibull(1.5, 2.0).unwrap(),
            ScalarDistribution::nakagami(1.3, 0.9).unwrap(),
            ScalarDistribution::rice(1.0, 0.6).unwrap(),
        ]
    }

    #[test]
    fn composite_of_deterministic_tiers() {
        let t = TierSpec::deterministic(1.0, 1.0, 4.0, 1.0).unwrap();
        assert_eq!(composite_moment(&t, |b| 2.0 / b).unwrap(), 1.0);
        let t = TierSpec::deterministic(1.8, 1.986e14, 3.638, 1.0).unwrap();
        let want = 1.986e14f64.powf(-2.0 / 3.638);
        let got = composite_moment(&t, |b| 2.0 / b).unwrap();
        assert!(rel(got, want) < 1e-14);
        assert!((got / 1e-8 - 1.38).abs() < 0.01);
    }

    #[test]
    fn composite_with_shadowing() {
        let one = ScalarDistribution::constant(1.0).unwrap();
        let t = TierSpec::independent(
            1.0,
            one.clone(),
            ScalarDistribution::lognormal_mean_one_db(5.0).unwrap(),
            one.clone(),
            ScalarDistribution::constant(3.307).unwrap(),
            one,
        );
        let got = composite_moment(&t, |b| 2.0 / b).unwrap();
        assert!((got - 0.8535).abs() < 5e-5);
    }

    #[test]
    fn composite_rejects_continuous_a() {
        let one = ScalarDistribution::constant(1.0).unwrap();
        let t = TierSpec::independent(
            1.0,
            one.clone(),
            one.clone(),
            ScalarDistribution::exponential(1.0).unwrap(),
            ScalarDistribution::constant(4.0).unwrap(),
            one,
        );
        assert!(composite_moment(&t, |b| 2.0 / b).is_err());
    }

    #[test]
    fn composite_mixes_beta_atoms() {
        let one = ScalarDistribution::constant(1.0).unwrap();
        let t = TierSpec::independent(
            1.0,
            one.clone(),
            one.clone(),
            ScalarDistribution::constant(16.0).unwrap(),
            ScalarDistribution::discrete(alloc::vec![(4.0, 0.5), (8.0, 0.5)]).unwrap(),
            one,
        );
        // 0.5·16^{-1/2} + 0.5·16^{-1/4}
        let got = composite_moment(&t, |b| 2.0 / b).unwrap();
        assert!((got - (0.125 + 0.25)).abs() < 1e-15);
    }
}
