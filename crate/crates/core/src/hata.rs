//! COST231-Hata path-loss parameters in power-law form.
//!
//! The median loss `L(d) = L₀ + (44.9 - 6.55 log₁₀ h_b) log₁₀ d` (d in km) is
//! rewritten as `ℓ(d) = A d^β` with `β = (44.9 - 6.55 log₁₀ h_b)/10` and
//! `A = 10^{L₀/10}`. Densities combined with these parameters are per km².

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use num_traits::Float;

use crate::{Error, Result};

/// Propagation environment. Only the metropolitan large-city variant is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Environment {
    MetropolitanLargeCity,
}

impl FromStr for Environment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metropolitan" | "large-city" | "metropolitan-large-city" | "urban-large" => {
                Ok(Self::MetropolitanLargeCity)
            }
            _ => Err(Error::Unsupported("environment: only metropolitan-large-city is implemented")),
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("metropolitan-large-city")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HataParams {
    /// Base-station antenna height, m.
    pub base_height: f64,
    /// User antenna height, m.
    pub user_height: f64,
    /// Carrier frequency, MHz.
    pub frequency: f64,
    pub environment: Environment,
}

/// Conditions outside the model's nominal range that still yield numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HataWarning {
    BaseHeightOutOfRange { height: f64 },
}

impl fmt::Display for HataWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BaseHeightOutOfRange { height } => {
                write!(f, "base-station height {height} m outside the nominal 30-200 m range")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HataOutput {
    pub beta: f64,
    /// `A`, for distances in km.
    pub pathloss_constant: f64,
    /// `L₀` in dB (loss at 1 km).
    pub intercept_db: f64,
    pub warnings: Vec<HataWarning>,
}

/// Large-city mobile antenna correction `a(h_m)` in dB.
fn mobile_correction(h_m: f64) -> f64 {
    let l = (11.75 * h_m).log10();
    3.2 * l * l - 4.97
}

const METROPOLITAN_OFFSET_DB: f64 = 3.0;

pub fn hata_params(p: &HataParams) -> Result<HataOutput> {
    if !(p.base_height > 0.0) || !p.base_height.is_finite() {
        return Err(Error::Domain { what: "base-station height", value: p.base_height });
    }
    if !(1.0..=10.0).contains(&p.user_height) {
        return Err(Error::Domain { what: "user height (1-10 m)", value: p.user_height });
    }
    if !(1500.0..=2000.0).contains(&p.frequency) {
        return Err(Error::Domain { what: "frequency (1500-2000 MHz)", value: p.frequency });
    }
    let Environment::MetropolitanLargeCity = p.environment;
    let mut warnings = Vec::new();
    if !(30.0..=200.0).contains(&p.base_height) {
        warnings.push(HataWarning::BaseHeightOutOfRange { height: p.base_height });
    }
    let log_hb = p.base_height.log10();
    let intercept_db = 46.3 + 33.9 * p.frequency.log10() - 13.82 * log_hb - mobile_correction(p.user_height)
        + METROPOLITAN_OFFSET_DB;
    Ok(HataOutput {
        beta: (44.9 - 6.55 * log_hb) / 10.0,
        pathloss_constant: 10f64.powf(intercept_db / 10.0),
        intercept_db,
        warnings,
    })
}

/// Density-weighted mean antenna height `Σ λ_k h_k / Σ λ_k`.
pub fn average_height(lambdas: &[f64], heights: &[f64]) -> Result<f64> {
    if lambdas.len() != heights.len() {
        return Err(Error::Invalid(alloc::format!(
            "{} densities but {} heights",
            lambdas.len(),
            heights.len()
        )));
    }
    if lambdas.is_empty() {
        return Err(Error::Invalid("no tiers".into()));
    }
    if let Some(&l) = lambdas.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::Domain { what: "density", value: l });
    }
    let total: f64 = lambdas.iter().sum();
    Ok(lambdas.iter().zip(heights).map(|(l, h)| l * h).sum::<f64>() / total)
}
