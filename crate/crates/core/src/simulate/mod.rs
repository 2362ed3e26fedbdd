//! Monte Carlo samplers for the propagation process.
//!
//! Three routes produce a [`PropagationSample`] on `(0, s_max]`:
//!
//! * [`SimMode::Original`] drops Poisson stations on a disk whose radius comes
//!   from [`truncation_radius`], draws their marks and maps them to
//!   `Y = |X|^β / S̃`;
//! * [`SimMode::Isotropic`] does the same for an [`IsotropicModel`], whose
//!   disk `r ≤ s_max^{1/β'}` is exact;
//! * [`SimMode::Direct`] inverts `Λ` on uniform points.
//!
//! Every replication owns three keyed streams (see [`rng`]). Counts are drawn
//! first (one Poisson draw per tier, in tier order), then radii, then marks
//! point by point. Only `|X|` enters `Y`, so angles are not drawn.

pub mod rng;
mod truncation;

pub use truncation::{deterministic_reach, missed_mass, truncation_radius, Truncation, DEFAULT_RADIUS_CAP};

use alloc::vec::Vec;
use core::str::FromStr;
use num_traits::Float;
use rand::RngCore;
use rand_distr::{Distribution, Poisson};

use crate::equivalence::IsotropicModel;
use crate::intensity::IntensityMeasure;
use crate::model::{open_unit, unit, CompositeMark, NetworkModel, PropagationPoint, PropagationSample, SampleMeta};
use crate::{Error, Result};
use rng::{stream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    Original,
    Isotropic,
    Direct,
}

impl SimMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimMode::Original => "original",
            SimMode::Isotropic => "isotropic",
            SimMode::Direct => "direct",
        }
    }
}

impl FromStr for SimMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" | "spatial-original" => Ok(SimMode::Original),
            "isotropic" | "spatial-isotropic" => Ok(SimMode::Isotropic),
            "direct" | "direct-propagation" => Ok(SimMode::Direct),
            _ => Err(Error::Invalid(alloc::format!("unknown simulation mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimPlan {
    pub s_max: f64,
    /// Acceptable expected number of missed in-window points per replication.
    pub epsilon: f64,
    pub master_seed: u64,
    pub replications: u64,
    pub mode: SimMode,
    /// Largest disk radius the original sampler may use.
    pub radius_cap: f64,
}

impl SimPlan {
    pub fn new(s_max: f64, epsilon: f64, master_seed: u64, replications: u64, mode: SimMode) -> Result<Self> {
        let plan = Self { s_max, epsilon, master_seed, replications, mode, radius_cap: DEFAULT_RADIUS_CAP };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_max > 0.0) || !self.s_max.is_finite() {
            return Err(Error::Domain { what: "s_max", value: self.s_max });
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Domain { what: "epsilon", value: self.epsilon });
        }
        if self.replications == 0 {
            return Err(Error::Invalid("replications must be at least 1".into()));
        }
        if !(self.radius_cap > 0.0) {
            return Err(Error::Domain { what: "radius cap", value: self.radius_cap });
        }
        Ok(())
    }
}

/// A prepared sampler. Preparation does the per-model work (truncation
/// search, radial mass) once; [`sample`](Self::sample) is then a pure
/// function of `(plan seed, replication)`.
#[derive(Debug, Clone)]
pub enum Sampler {
    Original { model: NetworkModel, truncation: Truncation },
    Isotropic { model: IsotropicModel, radius: f64, mass: f64 },
    Direct { measure: IntensityMeasure },
}

impl Sampler {
    pub fn original(model: &NetworkModel, plan: &SimPlan) -> Result<Self> {
        plan.validate()?;
        let truncation = truncation_radius(model, plan.s_max, plan.epsilon, plan.radius_cap)?;
        Ok(Sampler::Original { model: model.clone(), truncation })
    }

    pub fn isotropic(model: &IsotropicModel, plan: &SimPlan) -> Result<Self> {
        plan.validate()?;
        let radius = plan.s_max.powf(1.0 / model.beta_prime());
        let mass = model.radial_mass(radius)?;
        Ok(Sampler::Isotropic { model: model.clone(), radius, mass })
    }

    pub fn direct(measure: &IntensityMeasure, plan: &SimPlan) -> Result<Self> {
        plan.validate()?;
        Ok(Sampler::Direct { measure: measure.clone() })
    }

    /// Sampler for `plan.mode`; the isotropic route uses reference exponent `beta_prime`.
    pub fn for_plan(model: &NetworkModel, plan: &SimPlan, beta_prime: f64) -> Result<Self> {
        match plan.mode {
            SimMode::Original => Self::original(model, plan),
            SimMode::Isotropic => Self::isotropic(&IsotropicModel::from_intensity(&IntensityMeasure::new(model)?, beta_prime)?, plan),
            SimMode::Direct => Self::direct(&IntensityMeasure::new(model)?, plan),
        }
    }

    pub fn mode(&self) -> SimMode {
        match self {
            Sampler::Original { .. } => SimMode::Original,
            Sampler::Isotropic { .. } => SimMode::Isotropic,
            Sampler::Direct { .. } => SimMode::Direct,
        }
    }

    /// Disk radius and missed-mass bound.
    pub fn truncation(&self) -> (Option<f64>, f64) {
        match self {
            Sampler::Original { truncation, .. } => (Some(truncation.radius), truncation.missed_mass),
            Sampler::Isotropic { radius, .. } => (Some(*radius), 0.0),
            Sampler::Direct { .. } => (None, 0.0),
        }
    }

    pub fn sample(&self, plan: &SimPlan, replication: u64) -> PropagationSample {
        let (radius, missed_mass) = self.truncation();
        let meta = SampleMeta { seed: plan.master_seed, replication, radius, missed_mass };
        let points = match self {
            Sampler::Original { model, truncation } => original_points(model, truncation.radius, plan, replication),
            Sampler::Isotropic { model, radius, mass } => isotropic_points(model, *radius, *mass, plan, replication),
            Sampler::Direct { measure } => direct_points(measure, plan, replication),
        };
        PropagationSample::new(points, plan.s_max, meta)
    }
}

pub fn sample_original(model: &NetworkModel, plan: &SimPlan, replication: u64) -> Result<PropagationSample> {
    Ok(Sampler::original(model, plan)?.sample(plan, replication))
}

pub fn sample_isotropic(model: &IsotropicModel, plan: &SimPlan, replication: u64) -> Result<PropagationSample> {
    Ok(Sampler::isotropic(model, plan)?.sample(plan, replication))
}

pub fn sample_direct(measure: &IntensityMeasure, plan: &SimPlan, replication: u64) -> Result<PropagationSample> {
    Ok(Sampler::direct(measure, plan)?.sample(plan, replication))
}

/// Replications `0..plan.replications`, in order.
pub fn replicate(sampler: &Sampler, plan: &SimPlan) -> Vec<PropagationSample> {
    (0..plan.replications).map(|i| sampler.sample(plan, i)).collect()
}

fn poisson<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if !(mean > 0.0) {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(d) => {
            let n: f64 = d.sample(rng);
            n as usize
        }
        Err(_) => 0,
    }
}

fn original_points(model: &NetworkModel, radius: f64, plan: &SimPlan, replication: u64) -> Vec<PropagationPoint> {
    let mut counts_rng = stream(plan.master_seed, replication, Purpose::StationCount);
    let mut pos_rng = stream(plan.master_seed, replication, Purpose::Positions);
    let mut mark_rng = stream(plan.master_seed, replication, Purpose::Marks);
    let area = core::f64::consts::PI * radius * radius;
    let counts: Vec<usize> = model.tiers().iter().map(|t| poisson(t.lambda * area, &mut counts_rng)).collect();
    let mut points = Vec::new();
    for (k, (tier, &n)) in model.tiers().iter().zip(&counts).enumerate() {
        for _ in 0..n {
            let r = radius * unit(&mut pos_rng).sqrt();
            let m = tier.sample_marks(&mut mark_rng);
            let s_tilde = m.s_tilde();
            let y = r.powf(m.beta) / s_tilde;
            if y <= plan.s_max {
                points.push(PropagationPoint { y, mark: CompositeMark { s_tilde, beta: m.beta, t: m.threshold, tier: k } });
            }
        }
    }
    points
}

fn isotropic_points(model: &IsotropicModel, radius: f64, mass: f64, plan: &SimPlan, replication: u64) -> Vec<PropagationPoint> {
    let mut counts_rng = stream(plan.master_seed, replication, Purpose::StationCount);
    let mut pos_rng = stream(plan.master_seed, replication, Purpose::Positions);
    let mut mark_rng = stream(plan.master_seed, replication, Purpose::Marks);
    let n = poisson(mass, &mut counts_rng);
    let beta_prime = model.beta_prime();
    let radii: Vec<f64> = (0..n).map(|_| radial_quantile(model, radius, mass * open_unit(&mut pos_rng))).collect();
    let mut points = Vec::with_capacity(n);
    for r in radii {
        let weights = model.weights(r).unwrap_or_default();
        let j = pick(&weights, unit(&mut mark_rng));
        let term = &model.terms()[j];
        let t = term.mark.sample(&mut mark_rng);
        let y = r.powf(beta_prime).min(plan.s_max);
        points.push(PropagationPoint { y, mark: CompositeMark { s_tilde: 1.0, beta: beta_prime, t, tier: term.tier } });
    }
    points
}

/// Radius `r ∈ (0, radius]` with `M(r) = target`, by bisection to `1e-12` relative.
fn radial_quantile(model: &IsotropicModel, radius: f64, target: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = radius;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if model.radial_mass(mid).unwrap_or(f64::INFINITY) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn direct_points(measure: &IntensityMeasure, plan: &SimPlan, replication: u64) -> Vec<PropagationPoint> {
    let mut counts_rng = stream(plan.master_seed, replication, Purpose::StationCount);
    let mut pos_rng = stream(plan.master_seed, replication, Purpose::Positions);
    let mut mark_rng = stream(plan.master_seed, replication, Purpose::Marks);
    let total = measure.marginal(plan.s_max);
    let n = poisson(total, &mut counts_rng);
    let ys: Vec<f64> = (0..n).map(|_| measure.inverse(total * open_unit(&mut pos_rng)).min(plan.s_max)).collect();
    let mut points = Vec::with_capacity(n);
    for y in ys {
        let j = pick(&measure.term_posterior(y), unit(&mut mark_rng));
        let term = &measure.terms()[j];
        let t = term.mark.sample(&mut mark_rng);
        // Only E[S̃^{2/β}] is identified by the process; report its power mean.
        let s_tilde = term.moment.powf(1.0 / term.exponent());
        points.push(PropagationPoint { y, mark: CompositeMark { s_tilde, beta: term.beta, t, tier: term.tier } });
    }
    points
}

/// Index `j` with `Σ_{i<j} w_i ≤ u < Σ_{i≤j} w_i`, falling back to the last positive weight.
fn pick(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (j, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return j;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}
