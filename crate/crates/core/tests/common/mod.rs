#![allow(dead_code)]

use hetnet_core::{NetworkModel, ScalarDistribution, TierSpec};

/// Λ(s) = πs.
pub fn unit_model() -> NetworkModel {
    NetworkModel::new_with_free_space(vec![TierSpec::deterministic(1.0, 1.0, 2.0, 1.0).unwrap()]).unwrap()
}

/// Two tiers at 20 m and 100 m antenna height (1800 MHz, 1 m user), marks 1 and 2.
pub fn two_tier() -> NetworkModel {
    NetworkModel::new(vec![
        TierSpec::deterministic(1.8, 1.986e14, 3.638, 1.0).unwrap(),
        TierSpec::deterministic(2.2, 2.148e13, 3.180, 2.0).unwrap(),
    ])
    .unwrap()
}

/// [`two_tier`] with mean-one log-normal shadowing in both tiers.
pub fn two_tier_shadowed(sigma_db: f64) -> NetworkModel {
    let tier = |lambda: f64, a: f64, beta: f64, t: f64| {
        TierSpec::independent(
            lambda,
            ScalarDistribution::constant(1.0).unwrap(),
            ScalarDistribution::lognormal_mean_one_db(sigma_db).unwrap(),
            ScalarDistribution::constant(a).unwrap(),
            ScalarDistribution::constant(beta).unwrap(),
            ScalarDistribution::constant(t).unwrap(),
        )
    };
    NetworkModel::new(vec![tier(1.8, 1.986e14, 3.638, 1.0), tier(2.2, 2.148e13, 3.180, 2.0)]).unwrap()
}

/// Single tier with mean-one log-normal shadowing.
pub fn shadowed(sigma_db: f64, beta: f64) -> NetworkModel {
    let one = ScalarDistribution::constant(1.0).unwrap();
    NetworkModel::single(TierSpec::independent(
        1.0,
        one.clone(),
        ScalarDistribution::lognormal_mean_one_db(sigma_db).unwrap(),
        one.clone(),
        ScalarDistribution::constant(beta).unwrap(),
        one,
    ))
    .unwrap()
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}
