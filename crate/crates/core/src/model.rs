//! Network descriptions, mark distributions and realized propagation samples.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::{LN_10, PI};
use num_traits::Float;
use rand::RngCore;
use rand_distr::{Distribution, Gamma};

use crate::specfun::{gamma_p, ln_gamma, normal_cdf};
use crate::{Error, Result};

/// Tolerance on the total probability of discrete atoms.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Positive scalar distribution used for every station mark.
///
/// Nakagami and Rice are amplitude distributions: the density of `S` itself,
/// with `s²` in the exponent.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarDistribution {
    Constant { value: f64 },
    /// `ln S ~ N(mu, sigma²)`.
    LogNormal { mu: f64, sigma: f64 },
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Nakagami { m: f64, omega: f64 },
    Rice { nu: f64, sigma: f64 },
    /// Finite list of `(value, probability)` atoms.
    Discrete { atoms: Vec<(f64, f64)> },
}

fn invalid(kind: &'static str, reason: impl ToString) -> Error {
    Error::InvalidDistribution { kind, reason: reason.to_string() }
}

fn positive(kind: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(kind, format!("{name} must be finite and > 0, got {v}")))
    }
}

impl ScalarDistribution {
    pub fn constant(value: f64) -> Result<Self> {
        let d = Self::Constant { value };
        d.validate()?;
        Ok(d)
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        let d = Self::LogNormal { mu, sigma };
        d.validate()?;
        Ok(d)
    }

    /// Mean-one log-normal with logarithmic standard deviation `sigma_db`:
    /// `σ = σ_dB ln(10)/10`, `μ = -σ²/2`.
    pub fn lognormal_mean_one_db(sigma_db: f64) -> Result<Self> {
        let sigma = sigma_db_to_sigma(sigma_db);
        Self::lognormal(-0.5 * sigma * sigma, sigma)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let d = Self::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        let d = Self::Weibull { shape, scale };
        d.validate()?;
        Ok(d)
    }

    pub fn nakagami(m: f64, omega: f64) -> Result<Self> {
        let d = Self::Nakagami { m, omega };
        d.validate()?;
        Ok(d)
    }

    pub fn rice(nu: f64, sigma: f64) -> Result<Self> {
        let d = Self::Rice { nu, sigma };
        d.validate()?;
        Ok(d)
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let d = Self::Discrete { atoms };
        d.validate()?;
        Ok(d)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::LogNormal { .. } => "lognormal",
            Self::Exponential { .. } => "exponential",
            Self::Weibull { .. } => "weibull",
            Self::Nakagami { .. } => "nakagami",
            Self::Rice { .. } => "rice",
            Self::Discrete { .. } => "discrete",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind();
        match *self {
            Self::Constant { value } => positive(kind, "value", value),
            Self::LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(invalid(kind, format!("mu must be finite, got {mu}")));
                }
                positive(kind, "sigma", sigma)
            }
            Self::Exponential { rate } => positive(kind, "rate", rate),
            Self::Weibull { shape, scale } => {
                positive(kind, "k", shape)?;
                positive(kind, "scale", scale)
            }
            Self::Nakagami { m, omega } => {
                if !(m >= 0.5) || !m.is_finite() {
                    return Err(invalid(kind, format!("m must be >= 0.5, got {m}")));
                }
                positive(kind, "omega", omega)
            }
            Self::Rice { nu, sigma } => {
                if !(nu >= 0.0) || !nu.is_finite() {
                    return Err(invalid(kind, format!("nu must be >= 0, got {nu}")));
                }
                positive(kind, "sigma", sigma)
            }
            Self::Discrete { ref atoms } => {
                if atoms.is_empty() {
                    return Err(invalid(kind, "no atoms"));
                }
                let mut total = 0.0;
                for &(v, p) in atoms {
                    positive(kind, "atom value", v)?;
                    if !(0.0..=1.0).contains(&p) {
                        return Err(invalid(kind, format!("probability {p} outside [0, 1]")));
                    }
                    total += p;
                }
                if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
                    return Err(invalid(kind, format!("probabilities sum to {total}, not 1")));
                }
                Ok(())
            }
        }
    }

    /// Atoms of a constant or discrete law, merged and with zero-mass atoms dropped.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Self::Constant { value } => Some(alloc::vec![(*value, 1.0)]),
            Self::Discrete { atoms } => {
                let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
                for &(v, p) in atoms.iter().filter(|a| a.1 > 0.0) {
                    match out.iter_mut().find(|a| a.0 == v) {
                        Some(a) => a.1 += p,
                        None => out.push((v, p)),
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// True for laws putting all mass on a single value.
    pub fn is_degenerate(&self) -> bool {
        self.atoms().is_some_and(|a| a.len() == 1)
    }

    /// Largest point of the support (`+∞` for the continuous families).
    pub fn support_max(&self) -> f64 {
        match self.atoms() {
            Some(atoms) => atoms.iter().map(|a| a.0).fold(0.0, f64::max),
            None => f64::INFINITY,
        }
    }

    /// Smallest point of the support (0 for the continuous families).
    pub fn support_min(&self) -> f64 {
        match self.atoms() {
            Some(atoms) => atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min),
            None => 0.0,
        }
    }

    /// Density of a continuous law; `None` for constant and discrete laws.
    pub fn pdf(&self, s: f64) -> Option<f64> {
        if self.atoms().is_some() {
            return None;
        }
        if !(s > 0.0) {
            return Some(0.0);
        }
        let v = match *self {
            Self::LogNormal { mu, sigma } => {
                let z = (s.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (s * sigma * (2.0 * PI).sqrt())
            }
            Self::Exponential { rate } => rate * (-rate * s).exp(),
            Self::Weibull { shape, scale } => {
                let x = s / scale;
                shape / scale * x.powf(shape - 1.0) * (-x.powf(shape)).exp()
            }
            Self::Nakagami { m, omega } => {
                let ln = core::f64::consts::LN_2 + m * (m.ln() - omega.ln()) - ln_gamma(m).ok()?
                    + (2.0 * m - 1.0) * s.ln()
                    - m / omega * s * s;
                ln.exp()
            }
            Self::Rice { nu, sigma } => {
                let v2 = sigma * sigma;
                let arg = s * nu / v2;
                // I₀(z) e^{-(s²+ν²)/2σ²} = i0e(z) e^{-(s-ν)²/2σ²}
                let i0e = crate::specfun::bessel_i0_scaled(arg).ok()?;
                s / v2 * i0e * (-(s - nu) * (s - nu) / (2.0 * v2)).exp()
            }
            Self::Constant { .. } | Self::Discrete { .. } => unreachable!(),
        };
        Some(v)
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        if let Some(atoms) = self.atoms() {
            return atoms.iter().filter(|a| a.0 <= x).map(|a| a.1).sum::<f64>().min(1.0);
        }
        if !(x > 0.0) {
            return 0.0;
        }
        match *self {
            Self::LogNormal { mu, sigma } => normal_cdf((x.ln() - mu) / sigma),
            Self::Exponential { rate } => -(-rate * x).exp_m1(),
            Self::Weibull { shape, scale } => -(-(x / scale).powf(shape)).exp_m1(),
            Self::Nakagami { m, omega } => gamma_p(m, m * x * x / omega).unwrap_or(1.0),
            Self::Rice { nu, sigma } => rice_cdf(nu, sigma, x),
            Self::Constant { .. } | Self::Discrete { .. } => unreachable!(),
        }
    }

    /// One draw. Continuous families consume a fixed number of uniforms per
    /// draw, except Nakagami which uses a rejection-based gamma sampler.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::LogNormal { mu, sigma } => (mu + sigma * standard_normal(rng)).exp(),
            Self::Exponential { rate } => -open_unit(rng).ln() / rate,
            Self::Weibull { shape, scale } => scale * (-open_unit(rng).ln()).powf(1.0 / shape),
            Self::Nakagami { m, omega } => {
                let g = Gamma::new(m, omega / m).expect("validated nakagami parameters");
                g.sample(rng).sqrt()
            }
            Self::Rice { nu, sigma } => {
                let (z1, z2) = normal_pair(rng);
                let x = nu + sigma * z1;
                let y = sigma * z2;
                (x * x + y * y).sqrt()
            }
            Self::Discrete { ref atoms } => {
                let u = unit(rng);
                let mut acc = 0.0;
                for &(v, p) in atoms {
                    acc += p;
                    if u < acc {
                        return v;
                    }
                }
                atoms.iter().rev().find(|a| a.1 > 0.0).map(|a| a.0).unwrap_or(atoms[0].0)
            }
        }
    }
}

/// `σ = σ_dB ln(10) / 10`.
pub fn sigma_db_to_sigma(sigma_db: f64) -> f64 {
    sigma_db * LN_10 / 10.0
}

/// Rice CDF as a Poisson mixture of gamma CDFs (`R²/σ²` is non-central χ²₂).
fn rice_cdf(nu: f64, sigma: f64, x: f64) -> f64 {
    let mean = nu * nu / (2.0 * sigma * sigma);
    let y = x * x / (2.0 * sigma * sigma);
    let mut weight = (-mean).exp();
    let mut total = 0.0;
    let mut mass = 0.0;
    let mut j = 0.0;
    // Poisson weights, accumulated until the remaining mass is negligible.
    while j < 10_000.0 {
        if weight > 0.0 {
            total += weight * gamma_p(j + 1.0, y).unwrap_or(1.0);
            mass += weight;
        }
        if j > mean && 1.0 - mass < 1e-16 {
            break;
        }
        j += 1.0;
        weight = if mean > 0.0 { (j * mean.ln() - mean - ln_gamma(j + 1.0).unwrap_or(0.0)).exp() } else { 0.0 };
    }
    total.clamp(0.0, 1.0)
}

/// Uniform on `[0, 1)` with 53 random bits.
pub fn unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on `(0, 1]`.
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    1.0 - unit(rng)
}

/// Box–Muller pair: two uniforms in, two independent standard normals out.
pub fn normal_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    let r = (-2.0 * open_unit(rng).ln()).sqrt();
    let theta = 2.0 * PI * unit(rng);
    (r * theta.cos(), r * theta.sin())
}

/// One standard normal; the second Box–Muller value is discarded so every
/// normal costs exactly two uniforms.
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    normal_pair(rng).0
}

/// One station's realized marks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkDraw {
    pub power: f64,
    pub shadowing: f64,
    pub pathloss_constant: f64,
    pub beta: f64,
    pub threshold: f64,
}

impl MarkDraw {
    /// `S̃ = P S / A`.
    pub fn s_tilde(&self) -> f64 {
        self.power * self.shadowing / self.pathloss_constant
    }
}

/// One atom of a finite joint mark distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointAtom {
    pub power: f64,
    pub shadowing: f64,
    pub pathloss_constant: f64,
    pub beta: f64,
    pub threshold: f64,
    pub probability: f64,
}

impl JointAtom {
    pub fn s_tilde(&self) -> f64 {
        self.power * self.shadowing / self.pathloss_constant
    }
}

/// Joint law of a station's marks `(P, S, A, β, T)`.
#[derive(Debug, Clone, PartialEq)]
pub enum MarkLaw {
    /// Mutually independent marks; `beta` must be constant or discrete.
    Independent {
        power: ScalarDistribution,
        shadowing: ScalarDistribution,
        pathloss_constant: ScalarDistribution,
        beta: ScalarDistribution,
        threshold: ScalarDistribution,
    },
    /// Arbitrary dependence, given as a finite list of joint atoms.
    Joint(Vec<JointAtom>),
}

/// One homogeneous Poisson tier.
#[derive(Debug, Clone, PartialEq)]
pub struct TierSpec {
    /// Stations per unit area.
    pub lambda: f64,
    pub marks: MarkLaw,
}

impl TierSpec {
    pub fn independent(
        lambda: f64,
        power: ScalarDistribution,
        shadowing: ScalarDistribution,
        pathloss_constant: ScalarDistribution,
        beta: ScalarDistribution,
        threshold: ScalarDistribution,
    ) -> Self {
        Self {
            lambda,
            marks: MarkLaw::Independent { power, shadowing, pathloss_constant, beta, threshold },
        }
    }

    /// Tier with `P = S = 1` and constant `A`, `β` and `T`.
    pub fn deterministic(lambda: f64, pathloss_constant: f64, beta: f64, threshold: f64) -> Result<Self> {
        Ok(Self::independent(
            lambda,
            ScalarDistribution::constant(1.0)?,
            ScalarDistribution::constant(1.0)?,
            ScalarDistribution::constant(pathloss_constant)?,
            ScalarDistribution::constant(beta)?,
            ScalarDistribution::constant(threshold)?,
        ))
    }

    /// Check every invariant, including `β > 2` for all exponent atoms.
    pub fn validate(&self, tier: usize) -> Result<()> {
        self.validate_with_floor(tier, 2.0)
    }

    fn validate_with_floor(&self, tier: usize, beta_floor: f64) -> Result<()> {
        let fail = |field: &'static str, reason: alloc::string::String| Error::InvalidTier { tier, field, reason };
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(fail("lambda", format!("density must be finite and > 0, got {}", self.lambda)));
        }
        match &self.marks {
            MarkLaw::Independent { power, shadowing, pathloss_constant, beta, threshold } => {
                let fields = [
                    ("power", power),
                    ("shadowing", shadowing),
                    ("A", pathloss_constant),
                    ("beta", beta),
                    ("threshold", threshold),
                ];
                for (name, d) in fields {
                    d.validate().map_err(|e| fail(name, e.to_string()))?;
                }
                let atoms = beta
                    .atoms()
                    .ok_or_else(|| fail("beta", "path-loss exponent must be constant or discrete".into()))?;
                if let Some(&(b, _)) = atoms.iter().find(|a| !(a.0 > beta_floor)) {
                    return Err(fail("beta", format!("path-loss exponent must exceed {beta_floor}, got {b}")));
                }
            }
            MarkLaw::Joint(atoms) => {
                if atoms.is_empty() {
                    return Err(fail("joint", "no atoms".into()));
                }
                let mut total = 0.0;
                for a in atoms {
                    for (name, v) in [
                        ("power", a.power),
                        ("shadowing", a.shadowing),
                        ("A", a.pathloss_constant),
                        ("threshold", a.threshold),
                    ] {
                        if !(v > 0.0) || !v.is_finite() {
                            return Err(fail(name, format!("joint atom value must be finite and > 0, got {v}")));
                        }
                    }
                    if !(a.beta > beta_floor) || !a.beta.is_finite() {
                        return Err(fail("beta", format!("path-loss exponent must exceed {beta_floor}, got {}", a.beta)));
                    }
                    if !(0.0..=1.0).contains(&a.probability) {
                        return Err(fail("joint", format!("probability {} outside [0, 1]", a.probability)));
                    }
                    total += a.probability;
                }
                if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
                    return Err(fail("joint", format!("probabilities sum to {total}, not 1")));
                }
            }
        }
        Ok(())
    }

    /// Path-loss exponent atoms `(β, probability)`.
    pub fn beta_atoms(&self) -> Vec<(f64, f64)> {
        match &self.marks {
            MarkLaw::Independent { beta, .. } => beta.atoms().unwrap_or_default(),
            MarkLaw::Joint(atoms) => {
                let mut out: Vec<(f64, f64)> = Vec::new();
                for a in atoms.iter().filter(|a| a.probability > 0.0) {
                    match out.iter_mut().find(|o| o.0 == a.beta) {
                        Some(o) => o.1 += a.probability,
                        None => out.push((a.beta, a.probability)),
                    }
                }
                out
            }
        }
    }

    /// Draw one station's marks. Draw order: P, S, A, β, T.
    pub fn sample_marks<R: RngCore + ?Sized>(&self, rng: &mut R) -> MarkDraw {
        match &self.marks {
            MarkLaw::Independent { power, shadowing, pathloss_constant, beta, threshold } => MarkDraw {
                power: power.sample(rng),
                shadowing: shadowing.sample(rng),
                pathloss_constant: pathloss_constant.sample(rng),
                beta: beta.sample(rng),
                threshold: threshold.sample(rng),
            },
            MarkLaw::Joint(atoms) => {
                let u = unit(rng);
                let mut acc = 0.0;
                let mut pick = atoms.iter().rev().find(|a| a.probability > 0.0).unwrap_or(&atoms[0]);
                for a in atoms {
                    acc += a.probability;
                    if u < acc {
                        pick = a;
                        break;
                    }
                }
                MarkDraw {
                    power: pick.power,
                    shadowing: pick.shadowing,
                    pathloss_constant: pick.pathloss_constant,
                    beta: pick.beta,
                    threshold: pick.threshold,
                }
            }
        }
    }
}

/// Independent superposition of Poisson tiers.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    tiers: Vec<TierSpec>,
}

impl NetworkModel {
    pub fn new(tiers: Vec<TierSpec>) -> Result<Self> {
        if tiers.is_empty() {
            return Err(Error::EmptyModel);
        }
        for (i, t) in tiers.iter().enumerate() {
            t.validate(i)?;
        }
        Ok(Self { tiers })
    }

    /// Like [`new`](Self::new) but admits any exponent `β ≥ 2`.
    ///
    /// The free-space boundary `β = 2` gives a linear intensity `Λ(s) = πλs`,
    /// which is the natural reference model for calibrating the samplers and
    /// tests; it is not accepted from configuration files.
    pub fn new_with_free_space(tiers: Vec<TierSpec>) -> Result<Self> {
        if tiers.is_empty() {
            return Err(Error::EmptyModel);
        }
        for (i, t) in tiers.iter().enumerate() {
            t.validate_with_floor(i, 2.0 - f64::EPSILON)?;
        }
        Ok(Self { tiers })
    }

    pub fn single(tier: TierSpec) -> Result<Self> {
        Self::new(alloc::vec![tier])
    }

    pub fn tiers(&self) -> &[TierSpec] {
        &self.tiers
    }

    pub fn total_density(&self) -> f64 {
        self.tiers.iter().map(|t| t.lambda).sum()
    }

    /// Every tier density multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        let tiers = self.tiers.iter().map(|t| TierSpec { lambda: t.lambda * k, marks: t.marks.clone() }).collect();
        Self::new(tiers)
    }

    /// The constant `β` shared by every tier, if there is one.
    pub fn common_beta(&self) -> Option<f64> {
        let mut common = None;
        for t in &self.tiers {
            let atoms = t.beta_atoms();
            if atoms.len() != 1 {
                return None;
            }
            match common {
                None => common = Some(atoms[0].0),
                Some(b) if b == atoms[0].0 => {}
                Some(_) => return None,
            }
        }
        common
    }
}

/// Marks attached to one propagation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeMark {
    /// Effective propagation variable `S̃ = P S / A`.
    pub s_tilde: f64,
    pub beta: f64,
    pub t: f64,
    pub tier: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationPoint {
    /// Propagation loss `Y = |X|^β / S̃`.
    pub y: f64,
    pub mark: CompositeMark,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMeta {
    pub seed: u64,
    pub replication: u64,
    /// Simulation disk radius, for spatial samplers.
    pub radius: Option<f64>,
    /// Bound on the expected number of in-window points lost to truncation.
    pub missed_mass: f64,
}

/// Realized marked propagation process on `(0, s_max]`, sorted by `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationSample {
    pub points: Vec<PropagationPoint>,
    pub s_max: f64,
    pub meta: SampleMeta,
}

impl PropagationSample {
    /// Keeps points with `0 < y ≤ s_max` and sorts them.
    pub fn new(mut points: Vec<PropagationPoint>, s_max: f64, meta: SampleMeta) -> Self {
        points.retain(|p| p.y > 0.0 && p.y <= s_max);
        points.sort_by(|a, b| a.y.total_cmp(&b.y));
        Self { points, s_max, meta }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.y)
    }
}
