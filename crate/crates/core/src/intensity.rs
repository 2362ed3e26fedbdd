//! The intensity measure `Λ(s,t)` of the marked propagation process.
//!
//! For a superposition of Poisson tiers with constant or discrete path-loss
//! exponents, `Λ` is a finite mixture of power laws:
//!
//! ```text
//! Λ(s,t) = π Σ_j c_j s^{e_j} F_j(t),   c_j = λ_j E[S̃_j^{2/β_j}],  e_j = 2/β_j
//! ```
//!
//! with one term per tier and exponent atom (per `(β, T)` group for joint
//! marks). Keeping the mixture symbolic makes derivatives and inverses exact.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::model::{MarkLaw, NetworkModel, ScalarDistribution};
use crate::moments::{independent_s_tilde_moment, moment_closed};
use crate::{Error, Result};

/// One power-law component of `Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityTerm {
    /// Originating tier.
    pub tier: usize,
    /// Path-loss exponent of this component.
    pub beta: f64,
    /// Station density carried by the component (tier density × atom probability).
    pub density: f64,
    /// `E[S̃^{2/β}]` conditional on the component.
    pub moment: f64,
    /// Mark law `F_j` of the component.
    pub mark: ScalarDistribution,
    /// `E[A^{2/β}]` conditional on the component.
    pub pathloss_scale: f64,
}

impl IntensityTerm {
    /// `c_j = density · moment`.
    pub fn coefficient(&self) -> f64 {
        self.density * self.moment
    }

    /// `e_j = 2/β`.
    pub fn exponent(&self) -> f64 {
        2.0 / self.beta
    }

    /// Unmarked contribution `π c_j s^{e_j}`.
    pub fn lambda(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        PI * self.coefficient() * s.powf(self.exponent())
    }

    /// `d/ds` of [`lambda`](Self::lambda).
    pub fn density_at(&self, s: f64) -> f64 {
        let e = self.exponent();
        PI * self.coefficient() * e * s.powf(e - 1.0)
    }
}

/// Exact intensity measure of a network's propagation process.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMeasure {
    terms: Vec<IntensityTerm>,
}

/// Build `Λ` for a validated model.
pub fn build_intensity(model: &NetworkModel) -> Result<IntensityMeasure> {
    IntensityMeasure::new(model)
}

impl IntensityMeasure {
    pub fn new(model: &NetworkModel) -> Result<Self> {
        let mut terms = Vec::new();
        for (k, tier) in model.tiers().iter().enumerate() {
            match &tier.marks {
                MarkLaw::Independent { pathloss_constant, threshold, .. } => {
                    for (beta, p) in tier.beta_atoms() {
                        let q = 2.0 / beta;
                        terms.push(IntensityTerm {
                            tier: k,
                            beta,
                            density: tier.lambda * p,
                            moment: independent_s_tilde_moment(tier, q)?,
                            mark: threshold.clone(),
                            pathloss_scale: moment_closed(pathloss_constant, q)?,
                        });
                    }
                }
                MarkLaw::Joint(atoms) => {
                    // Group atoms sharing (β, T); each group is one power-law term.
                    let mut groups: Vec<(f64, f64, f64, f64, f64)> = Vec::new();
                    for a in atoms.iter().filter(|a| a.probability > 0.0) {
                        let q = 2.0 / a.beta;
                        let m = a.probability * a.s_tilde().powf(q);
                        let sa = a.probability * a.pathloss_constant.powf(q);
                        match groups.iter_mut().find(|g| g.0 == a.beta && g.1 == a.threshold) {
                            Some(g) => {
                                g.2 += a.probability;
                                g.3 += m;
                                g.4 += sa;
                            }
                            None => groups.push((a.beta, a.threshold, a.probability, m, sa)),
                        }
                    }
                    for (beta, t, p, m, sa) in groups {
                        terms.push(IntensityTerm {
                            tier: k,
                            beta,
                            density: tier.lambda * p,
                            moment: m / p,
                            mark: ScalarDistribution::constant(t)?,
                            pathloss_scale: sa / p,
                        });
                    }
                }
            }
        }
        for t in &terms {
            if !t.moment.is_finite() || !(t.moment > 0.0) {
                return Err(Error::Moment {
                    kind: "S̃",
                    q: t.exponent(),
                    reason: "E[S̃^{2/β}] must be finite and positive",
                });
            }
        }
        Ok(Self { terms })
    }

    /// Assemble directly from terms (used for derived measures and tests).
    pub fn from_terms(terms: Vec<IntensityTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyModel);
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[IntensityTerm] {
        &self.terms
    }

    /// `Λ(s,t)`; pass `t = f64::INFINITY` for the marginal `Λ(s)`.
    pub fn lambda(&self, s: f64, t: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        self.terms.iter().map(|j| j.lambda(s) * j.mark.cdf(t)).sum()
    }

    /// Marginal `Λ(s) = lim_{t→∞} Λ(s,t)`.
    pub fn marginal(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        self.terms.iter().map(|j| j.lambda(s)).sum()
    }

    /// `dΛ(s)/ds`.
    pub fn density(&self, s: f64) -> f64 {
        self.terms.iter().map(|j| j.density_at(s)).sum()
    }

    /// Posterior term probabilities of a point at `y`: `∝ c_j e_j y^{e_j - 1}`.
    pub fn term_posterior(&self, y: f64) -> Vec<f64> {
        let w: Vec<f64> = self.terms.iter().map(|j| j.density_at(y)).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    /// Solve `Λ(s) = u` for `s`.
    ///
    /// Single-term measures invert in closed form; mixtures use Newton steps in
    /// `ln s`, safeguarded by bisection, to `1e-12` relative.
    pub fn inverse(&self, u: f64) -> f64 {
        if !(u > 0.0) {
            return 0.0;
        }
        if let [only] = self.terms.as_slice() {
            return (u / (PI * only.coefficient())).powf(1.0 / only.exponent());
        }
        let n = self.terms.len() as f64;
        // Each term alone bounds the root from above; the largest term is at
        // least u/n at the root, which bounds it from below.
        let single = |j: &IntensityTerm, v: f64| (v / (PI * j.coefficient())).powf(1.0 / j.exponent());
        let mut hi = self.terms.iter().map(|j| single(j, u)).fold(f64::INFINITY, f64::min).ln();
        let mut lo = self.terms.iter().map(|j| single(j, u / n)).fold(f64::INFINITY, f64::min).ln();
        let target = u.ln();
        let mut x = hi;
        for _ in 0..200 {
            let s = x.exp();
            let lam = self.marginal(s);
            let f = lam.ln() - target;
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            // d ln Λ / d ln s = s Λ'(s) / Λ(s)
            let slope = s * self.density(s) / lam;
            let mut next = x - f / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-14 * x.abs().max(1.0) || hi - lo <= 1e-14 * hi.abs().max(1.0) {
                return next.exp();
            }
            x = next;
        }
        x.exp()
    }

    /// `φ(r,t) = (1/2πr) ∂_r Λ(r^{β'}, t) = (β'/2) Σ c_j e_j r^{β' e_j - 2} F_j(t)`.
    pub fn phi_rt(&self, beta_prime: f64, r: f64, t: f64) -> Result<f64> {
        check_beta_prime(beta_prime)?;
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain { what: "radius", value: r });
        }
        let mut total = 0.0;
        for j in &self.terms {
            let g = beta_prime * j.exponent() - 2.0;
            if r == 0.0 && g < 0.0 {
                return Err(Error::Singular("radial density is infinite at r = 0"));
            }
            total += 0.5 * beta_prime * j.coefficient() * j.exponent() * r.powf(g) * j.mark.cdf(t);
        }
        Ok(total)
    }

    /// `φ(r) = lim_{t→∞} φ(r,t)`.
    pub fn phi(&self, beta_prime: f64, r: f64) -> Result<f64> {
        self.phi_rt(beta_prime, r, f64::INFINITY)
    }

    /// Location-dependent mark CDF `F'_r(t) = φ(r,t)/φ(r)`.
    pub fn mark_cdf(&self, beta_prime: f64, r: f64, t: f64) -> Result<f64> {
        let total = self.phi(beta_prime, r)?;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Singular("radial density must be finite and positive"));
        }
        Ok((self.phi_rt(beta_prime, r, t)? / total).min(1.0))
    }

    /// Mixture weights `p_j(r)` of the mark family at radius `r`.
    pub fn weights(&self, beta_prime: f64, r: f64) -> Result<Vec<f64>> {
        let total = self.phi(beta_prime, r)?;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Singular("radial density must be finite and positive"));
        }
        Ok(self
            .terms
            .iter()
            .map(|j| 0.5 * beta_prime * j.coefficient() * j.exponent() * r.powf(beta_prime * j.exponent() - 2.0) / total)
            .collect())
    }

    /// Distinct mark atoms across all terms, or `None` if some mark is continuous.
    pub fn mark_atoms(&self) -> Option<Vec<f64>> {
        let mut out = Vec::new();
        for j in &self.terms {
            for (t, _) in j.mark.atoms()? {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        Some(out)
    }
}

pub(crate) fn check_beta_prime(beta_prime: f64) -> Result<()> {
    if beta_prime > 0.0 && beta_prime.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what: "reference exponent β'", value: beta_prime })
    }
}
