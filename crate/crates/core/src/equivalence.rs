//! Isotropic representations and the closed-form special cases.
//!
//! Any network handled by [`IntensityMeasure`] induces the same propagation
//! process as an isotropic Poisson network with `P = S = A = 1`, a common
//! exponent `β'`, station density
//!
//! ```text
//! φ(r) = Σ_j (β'/β_j) c_j r^{2(β'/β_j - 1)}
//! ```
//!
//! and marks drawn at radius `r` from the mixture with weights
//! `p_j(r) = (β'/β_j) c_j r^{2(β'/β_j - 1)} / φ(r)`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::intensity::{build_intensity, check_beta_prime, IntensityMeasure};
use crate::model::{NetworkModel, ScalarDistribution};
use crate::moments::moment_closed;
use crate::specfun::{gamma, quad_points, QuadOptions};
use crate::{Error, Result};

/// `coefficient · r^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub coefficient: f64,
    pub exponent: f64,
}

/// Finite sum of power laws in `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMixture {
    pub terms: Vec<PowerLaw>,
}

impl PowerMixture {
    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.coefficient * r.powf(t.exponent)).sum()
    }
}

/// One component of an isotropic density.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTerm {
    /// `d_j` in `d_j r^{g_j}`.
    pub density: f64,
    /// `g_j = 2(β'/β_j - 1)`.
    pub exponent: f64,
    pub mark: ScalarDistribution,
    pub tier: usize,
    /// Exponent `β_j` of the originating component.
    pub source_beta: f64,
    /// `E[A^{2/β_j}]` of the originating component.
    pub pathloss_scale: f64,
}

/// Isotropic single-tier network equivalent to some heterogeneous network.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicModel {
    beta_prime: f64,
    terms: Vec<RadialTerm>,
}

/// Isotropic representation of `model` with reference exponent `beta_prime`.
pub fn isotropic_representation(model: &NetworkModel, beta_prime: f64) -> Result<IsotropicModel> {
    IsotropicModel::from_intensity(&build_intensity(model)?, beta_prime)
}

impl IsotropicModel {
    pub fn new(beta_prime: f64, terms: Vec<RadialTerm>) -> Result<Self> {
        check_beta_prime(beta_prime)?;
        if terms.is_empty() {
            return Err(Error::EmptyModel);
        }
        if let Some(t) = terms.iter().find(|t| !(t.density > 0.0) || !t.density.is_finite()) {
            return Err(Error::Invalid(alloc::format!("radial density coefficient {} must be finite and > 0", t.density)));
        }
        Ok(Self { beta_prime, terms })
    }

    pub fn from_intensity(im: &IntensityMeasure, beta_prime: f64) -> Result<Self> {
        check_beta_prime(beta_prime)?;
        let terms = im
            .terms()
            .iter()
            .map(|j| {
                let ratio = beta_prime / j.beta;
                RadialTerm {
                    density: ratio * j.coefficient(),
                    exponent: 2.0 * (ratio - 1.0),
                    mark: j.mark.clone(),
                    tier: j.tier,
                    source_beta: j.beta,
                    pathloss_scale: j.pathloss_scale,
                }
            })
            .collect();
        Self::new(beta_prime, terms)
    }

    pub fn beta_prime(&self) -> f64 {
        self.beta_prime
    }

    pub fn terms(&self) -> &[RadialTerm] {
        &self.terms
    }

    /// True when `φ` is constant in `r`.
    pub fn is_homogeneous(&self) -> bool {
        self.terms.iter().all(|t| t.exponent == 0.0)
    }

    pub fn density(&self) -> PowerMixture {
        PowerMixture {
            terms: self.terms.iter().map(|t| PowerLaw { coefficient: t.density, exponent: t.exponent }).collect(),
        }
    }

    /// Station density `φ(r)`.
    pub fn phi(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.density().eval(r))
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain { what: "radius", value: r });
        }
        if r == 0.0 && self.terms.iter().any(|t| t.exponent < 0.0) {
            return Err(Error::Singular("radial density is infinite at r = 0"));
        }
        Ok(())
    }

    /// Mark mixture weights `p_j(r)`; they sum to one.
    pub fn weights(&self, r: f64) -> Result<Vec<f64>> {
        let total = self.phi(r)?;
        if !(total > 0.0) {
            return Err(Error::Singular("radial density vanishes"));
        }
        Ok(self.terms.iter().map(|t| t.density * r.powf(t.exponent) / total).collect())
    }

    /// `F'_r(t) = Σ_j p_j(r) F_j(t)`.
    pub fn mark_cdf(&self, r: f64, t: f64) -> Result<f64> {
        let w = self.weights(r)?;
        Ok(w.iter().zip(&self.terms).map(|(p, j)| p * j.mark.cdf(t)).sum::<f64>().min(1.0))
    }

    /// Expected number of stations in the disk of radius `r`:
    /// `Σ_j 2π d_j r^{g_j+2} / (g_j+2)`.
    pub fn radial_mass(&self, r: f64) -> Result<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            let k = t.exponent + 2.0;
            if !(k > 0.0) {
                return Err(Error::Singular("radial density is not integrable at the origin"));
            }
            if r > 0.0 {
                total += 2.0 * PI * t.density * r.powf(k) / k;
            }
        }
        Ok(total)
    }

    /// Intensity `Λ'(s,t)` of the isotropic network's propagation process, in
    /// closed form.
    pub fn intensity(&self, s: f64, t: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let r = s.powf(1.0 / self.beta_prime);
        let mut total = 0.0;
        for j in &self.terms {
            let k = j.exponent + 2.0;
            if !(k > 0.0) {
                return Err(Error::Singular("radial density is not integrable at the origin"));
            }
            total += 2.0 * PI * j.density * r.powf(k) / k * j.mark.cdf(t);
        }
        Ok(total)
    }

    /// `Λ'(s,t) = 2π ∫₀^{s^{1/β'}} F'_r(t) φ(r) r dr` by adaptive quadrature.
    pub fn intensity_by_quadrature(&self, s: f64, t: f64, rel_tol: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let upper = s.powf(1.0 / self.beta_prime);
        let integrand = |r: f64| {
            if r <= 0.0 {
                return 0.0;
            }
            let phi = self.density().eval(r);
            let f = self.mark_cdf(r, t).unwrap_or(0.0);
            2.0 * PI * f * phi * r
        };
        let opts = QuadOptions { abs_tol: 0.0, rel_tol, max_intervals: 10_000 };
        quad_points(integrand, &[0.0, upper], opts)
    }
}

/// Station density for plotting: each term scaled by `E[A^{2/β_j}]`, which
/// restores the magnitude of the original densities.
pub fn a_corrected_density(iso: &IsotropicModel) -> PowerMixture {
    PowerMixture {
        terms: iso
            .terms
            .iter()
            .map(|t| PowerLaw { coefficient: t.density * t.pathloss_scale, exponent: t.exponent })
            .collect(),
    }
}

/// Arithmetic mean of the tiers' mean exponents; `(β₁+β₂)/2` for two tiers.
pub fn default_beta_prime(model: &NetworkModel) -> f64 {
    let tiers = model.tiers();
    let total: f64 = tiers.iter().map(|t| t.beta_atoms().iter().map(|(b, p)| b * p).sum::<f64>()).sum();
    total / tiers.len() as f64
}

/// Constant density `λ' = Σ_k λ_k E[S̃_k^{2/β}]` of a network whose tiers share
/// one constant exponent.
pub fn homogeneous_density(model: &NetworkModel) -> Result<f64> {
    let Some(_) = model.common_beta() else {
        return Err(Error::Unsupported("homogeneous density needs one constant exponent shared by all tiers"));
    };
    Ok(build_intensity(model)?.terms().iter().map(|t| t.coefficient()).sum())
}

/// Density under which mean-one exponential propagation effects reproduce the
/// same intensity: `λ E[S̃^{2/β}] / Γ(2/β + 1)`.
pub fn exponential_replacement_density(model: &NetworkModel) -> Result<f64> {
    let beta = model
        .common_beta()
        .ok_or(Error::Unsupported("exponential replacement needs one constant exponent shared by all tiers"))?;
    Ok(homogeneous_density(model)? / gamma(2.0 / beta + 1.0)?)
}

/// Densities of the isotropic representations with random and with averaged
/// propagation variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenComparison {
    /// `λ E[S̃^{2/β}]`
    pub lambda_random: f64,
    /// `λ E[S̃]^{2/β}`
    pub lambda_mean: f64,
}

pub fn jensen_compare(dist: &ScalarDistribution, beta: f64, lambda: f64) -> Result<JensenComparison> {
    if !(beta > 2.0) || !beta.is_finite() {
        return Err(Error::Domain { what: "path-loss exponent", value: beta });
    }
    let q = 2.0 / beta;
    let mean = dist.mean()?;
    if !mean.is_finite() {
        return Err(Error::Moment { kind: dist.kind(), q: 1.0, reason: "mean must be finite" });
    }
    Ok(JensenComparison {
        lambda_random: lambda * moment_closed(dist, q)?,
        lambda_mean: lambda * mean.powf(q),
    })
}

/// Which of two equal-mean propagation variables yields the sparser network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sparsity {
    Tie,
    FirstSparser,
    SecondSparser,
}

/// Compare `E[S̃₁^{2/β}]` and `E[S̃₂^{2/β}]` for equal-mean variables.
pub fn variability_order_check(first: &ScalarDistribution, second: &ScalarDistribution, beta: f64) -> Result<Sparsity> {
    let m1 = first.mean()?;
    let m2 = second.mean()?;
    if (m1 - m2).abs() > 1e-9 * m1.abs().max(m2.abs()).max(1.0) {
        return Err(Error::Invalid(alloc::format!("means differ: {m1} vs {m2}")));
    }
    let a = jensen_compare(first, beta, 1.0)?.lambda_random;
    let b = jensen_compare(second, beta, 1.0)?.lambda_random;
    Ok(if (a - b).abs() <= 1e-12 * a.max(b) {
        Sparsity::Tie
    } else if a < b {
        Sparsity::FirstSparser
    } else {
        Sparsity::SecondSparser
    })
}
