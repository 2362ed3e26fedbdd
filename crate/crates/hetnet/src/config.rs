//! JSON network configuration.
//!
//! ```json
//! {"tiers": [{"lambda": 1.8,
//!             "power": {"kind": "constant", "value": 1},
//!             "shadowing": {"kind": "lognormal", "sigma_db": 5, "mean_one": true},
//!             "A": {"kind": "constant", "value": 1.986e14},
//!             "beta": {"kind": "constant", "value": 3.638},
//!             "threshold": {"kind": "constant", "value": 1}}]}
//! ```
//!
//! With `"independent_marks": false` the five mark fields are replaced by a
//! `"joint"` list of atoms `{"power", "shadowing", "A", "beta", "threshold",
//! "probability"}`.

use hetnet_core::{JointAtom, MarkLaw, NetworkModel, ScalarDistribution, TierSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {reason}")]
    Field { path: String, reason: String },
}

impl ConfigError {
    fn field(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Field { path: path.into(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistConfig {
    Constant {
        value: f64,
    },
    Lognormal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma_db: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mean_one: Option<bool>,
    },
    Exponential {
        rate: f64,
    },
    Weibull {
        k: f64,
        scale: f64,
    },
    Nakagami {
        m: f64,
        omega: f64,
    },
    Rice {
        nu: f64,
        sigma: f64,
    },
    Discrete {
        atoms: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointAtomConfig {
    pub power: f64,
    pub shadowing: f64,
    #[serde(rename = "A")]
    pub pathloss_constant: f64,
    pub beta: f64,
    pub threshold: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierConfig {
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<DistConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadowing: Option<DistConfig>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub pathloss_constant: Option<DistConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<DistConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<DistConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independent_marks: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<Vec<JointAtomConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub tiers: Vec<TierConfig>,
}

impl DistConfig {
    pub fn to_distribution(&self, path: &str) -> Result<ScalarDistribution, ConfigError> {
        let bad = |e: hetnet_core::Error| ConfigError::field(path, e.to_string());
        match *self {
            DistConfig::Constant { value } => ScalarDistribution::constant(value).map_err(bad),
            DistConfig::Lognormal { mu, sigma, sigma_db, mean_one } => match (mu, sigma, sigma_db, mean_one) {
                (None, None, Some(db), Some(true)) => ScalarDistribution::lognormal_mean_one_db(db).map_err(bad),
                (None, None, Some(_), _) => {
                    Err(ConfigError::field(path, "lognormal with sigma_db requires \"mean_one\": true"))
                }
                (Some(mu), Some(sigma), None, None) => ScalarDistribution::lognormal(mu, sigma).map_err(bad),
                _ => Err(ConfigError::field(path, "lognormal takes either {mu, sigma} or {sigma_db, mean_one}")),
            },
            DistConfig::Exponential { rate } => ScalarDistribution::exponential(rate).map_err(bad),
            DistConfig::Weibull { k, scale } => ScalarDistribution::weibull(k, scale).map_err(bad),
            DistConfig::Nakagami { m, omega } => ScalarDistribution::nakagami(m, omega).map_err(bad),
            DistConfig::Rice { nu, sigma } => ScalarDistribution::rice(nu, sigma).map_err(bad),
            DistConfig::Discrete { ref atoms } => ScalarDistribution::discrete(atoms.clone()).map_err(bad),
        }
    }

    pub fn from_distribution(d: &ScalarDistribution) -> Self {
        match *d {
            ScalarDistribution::Constant { value } => DistConfig::Constant { value },
            ScalarDistribution::LogNormal { mu, sigma } => {
                DistConfig::Lognormal { mu: Some(mu), sigma: Some(sigma), sigma_db: None, mean_one: None }
            }
            ScalarDistribution::Exponential { rate } => DistConfig::Exponential { rate },
            ScalarDistribution::Weibull { shape, scale } => DistConfig::Weibull { k: shape, scale },
            ScalarDistribution::Nakagami { m, omega } => DistConfig::Nakagami { m, omega },
            ScalarDistribution::Rice { nu, sigma } => DistConfig::Rice { nu, sigma },
            ScalarDistribution::Discrete { ref atoms } => DistConfig::Discrete { atoms: atoms.clone() },
        }
    }
}

impl TierConfig {
    fn to_tier(&self, k: usize) -> Result<TierSpec, ConfigError> {
        let path = |f: &str| format!("tiers[{k}].{f}");
        if self.independent_marks.unwrap_or(true) {
            if self.joint.is_some() {
                return Err(ConfigError::field(path("joint"), "only allowed with \"independent_marks\": false"));
            }
            let get = |name: &str, d: &Option<DistConfig>| {
                d.as_ref()
                    .ok_or_else(|| ConfigError::field(path(name), "missing field"))?
                    .to_distribution(&path(name))
            };
            Ok(TierSpec::independent(
                self.lambda,
                get("power", &self.power)?,
                get("shadowing", &self.shadowing)?,
                get("A", &self.pathloss_constant)?,
                get("beta", &self.beta)?,
                get("threshold", &self.threshold)?,
            ))
        } else {
            let atoms = self
                .joint
                .as_ref()
                .ok_or_else(|| ConfigError::field(path("joint"), "required when \"independent_marks\" is false"))?;
            for (name, d) in [
                ("power", &self.power),
                ("shadowing", &self.shadowing),
                ("A", &self.pathloss_constant),
                ("beta", &self.beta),
                ("threshold", &self.threshold),
            ] {
                if d.is_some() {
                    return Err(ConfigError::field(path(name), "dependent marks are given only through \"joint\""));
                }
            }
            let atoms = atoms
                .iter()
                .map(|a| JointAtom {
                    power: a.power,
                    shadowing: a.shadowing,
                    pathloss_constant: a.pathloss_constant,
                    beta: a.beta,
                    threshold: a.threshold,
                    probability: a.probability,
                })
                .collect();
            Ok(TierSpec { lambda: self.lambda, marks: MarkLaw::Joint(atoms) })
        }
    }

    fn from_tier(t: &TierSpec) -> Self {
        match &t.marks {
            MarkLaw::Independent { power, shadowing, pathloss_constant, beta, threshold } => TierConfig {
                lambda: t.lambda,
                power: Some(DistConfig::from_distribution(power)),
                shadowing: Some(DistConfig::from_distribution(shadowing)),
                pathloss_constant: Some(DistConfig::from_distribution(pathloss_constant)),
                beta: Some(DistConfig::from_distribution(beta)),
                threshold: Some(DistConfig::from_distribution(threshold)),
                independent_marks: None,
                joint: None,
            },
            MarkLaw::Joint(atoms) => TierConfig {
                lambda: t.lambda,
                power: None,
                shadowing: None,
                pathloss_constant: None,
                beta: None,
                threshold: None,
                independent_marks: Some(false),
                joint: Some(
                    atoms
                        .iter()
                        .map(|a| JointAtomConfig {
                            power: a.power,
                            shadowing: a.shadowing,
                            pathloss_constant: a.pathloss_constant,
                            beta: a.beta,
                            threshold: a.threshold,
                            probability: a.probability,
                        })
                        .collect(),
                ),
            },
        }
    }
}

impl ModelConfig {
    pub fn to_model(&self) -> Result<NetworkModel, ConfigError> {
        if self.tiers.is_empty() {
            return Err(ConfigError::field("tiers", "at least one tier is required"));
        }
        let tiers = self.tiers.iter().enumerate().map(|(k, t)| t.to_tier(k)).collect::<Result<Vec<_>, _>>()?;
        NetworkModel::new(tiers).map_err(|e| match e {
            hetnet_core::Error::InvalidTier { tier, field, reason } => {
                ConfigError::field(format!("tiers[{tier}].{field}"), reason)
            }
            other => ConfigError::field("tiers", other.to_string()),
        })
    }

    pub fn from_model(model: &NetworkModel) -> Self {
        Self { tiers: model.tiers().iter().map(TierConfig::from_tier).collect() }
    }
}

/// Parse and validate a configuration document.
pub fn parse_model(text: &str) -> Result<NetworkModel, ConfigError> {
    serde_json::from_str::<ModelConfig>(text)?.to_model()
}

/// Serialize a model; [`parse_model`] of the result reproduces it exactly.
pub fn serialize_model(model: &NetworkModel) -> String {
    serde_json::to_string_pretty(&ModelConfig::from_model(model)).expect("model config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: &str = r#"{"tiers":[{"lambda":1,
        "power":{"kind":"constant","value":1},"shadowing":{"kind":"constant","value":1},
        "A":{"kind":"constant","value":1},"beta":{"kind":"constant","value":4},
        "threshold":{"kind":"constant","value":1}}]}"#;

    #[test]
    fn unit_config() {
        let m = parse_model(UNIT).unwrap();
        assert_eq!(m, NetworkModel::single(TierSpec::deterministic(1.0, 1.0, 4.0, 1.0).unwrap()).unwrap());
    }

    #[test]
    fn free_space_rejected() {
        let err = parse_model(&UNIT.replace("\"value\":4", "\"value\":2")).unwrap_err();
        assert!(err.to_string().starts_with("tiers[0].beta:"), "{err}");
    }

    #[test]
    fn negative_density_named() {
        let err = parse_model(&UNIT.replace("\"lambda\":1", "\"lambda\":-1")).unwrap_err();
        assert!(err.to_string().starts_with("tiers[0].lambda:"), "{err}");
    }

    #[test]
    fn missing_and_unknown_fields() {
        let err = parse_model(&UNIT.replace("\"A\"", "\"B\"")).unwrap_err();
        assert!(matches!(err, ConfigError::Json(_)), "{err}");
        let err = parse_model(r#"{"tiers":[{"lambda":1}]}"#).unwrap_err();
        assert!(err.to_string().starts_with("tiers[0].power: missing"), "{err}");
    }

    #[test]
    fn lognormal_forms() {
        let mean_one: DistConfig = serde_json::from_str(r#"{"kind":"lognormal","sigma_db":5,"mean_one":true}"#).unwrap();
        assert_eq!(mean_one.to_distribution("x").unwrap(), ScalarDistribution::lognormal_mean_one_db(5.0).unwrap());
        let plain: DistConfig = serde_json::from_str(r#"{"kind":"lognormal","mu":0.1,"sigma":0.2}"#).unwrap();
        assert_eq!(plain.to_distribution("x").unwrap(), ScalarDistribution::lognormal(0.1, 0.2).unwrap());
        let mixed: DistConfig = serde_json::from_str(r#"{"kind":"lognormal","mu":0.1,"sigma_db":5}"#).unwrap();
        assert!(mixed.to_distribution("x").is_err());
    }

    #[test]
    fn joint_requires_flag() {
        let text = r#"{"tiers":[{"lambda":1,"independent_marks":false,"joint":[
            {"power":1,"shadowing":1,"A":1,"beta":3,"threshold":1,"probability":0.5},
            {"power":2,"shadowing":1,"A":1,"beta":4,"threshold":2,"probability":0.5}]}]}"#;
        let m = parse_model(text).unwrap();
        assert!(matches!(m.tiers()[0].marks, MarkLaw::Joint(ref a) if a.len() == 2));
        assert!(parse_model(&text.replace("false", "true")).is_err());
        assert_eq!(parse_model(&serialize_model(&m)).unwrap(), m);
    }
}
