//! Radial density curves of the two-tier COST231-Hata network and its
//! single-tier average, with and without shadowing.
//!
//! Tier 1: `λ = 1.8`, antenna 20 m; tier 2: `λ = 2.2`, antenna 100 m; the
//! single tier has `λ = 4` at the density-weighted height (64 m). All use a
//! 1 m user antenna at 1800 MHz. Curves are `φ(r)` of the isotropic
//! representation with `β'` equal to the single tier's exponent, each term
//! multiplied by `E[A^{2/β}]` so that the values read as station densities.

use std::path::Path;

use hetnet_core::equivalence::a_corrected_density;
use hetnet_core::hata::{average_height, hata_params, Environment, HataParams};
use hetnet_core::{isotropic_representation, NetworkModel, ScalarDistribution, TierSpec};

pub const DENSITIES: [f64; 2] = [1.8, 2.2];
pub const HEIGHTS: [f64; 2] = [20.0, 100.0];
pub const USER_HEIGHT: f64 = 1.0;
pub const FREQUENCY_MHZ: f64 = 1800.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Options {
    pub sigma_db: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub log_grid: bool,
}

impl Default for Figure1Options {
    fn default() -> Self {
        Self { sigma_db: 5.0, r_min: 1e-2, r_max: 10.0, points: 200, log_grid: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: &'static str,
    pub r: Vec<f64>,
    /// Corrected density, total.
    pub phi: Vec<f64>,
    /// Corrected density per tier.
    pub per_tier: Vec<Vec<f64>>,
}

/// `points` values from `lo` to `hi`, geometric or arithmetic.
pub fn grid(lo: f64, hi: f64, points: usize, log: bool) -> Vec<f64> {
    if points == 1 {
        return vec![hi];
    }
    (0..points)
        .map(|i| {
            let f = i as f64 / (points - 1) as f64;
            if i + 1 == points {
                hi
            } else if log {
                (lo.ln() + (hi.ln() - lo.ln()) * f).exp()
            } else {
                lo + (hi - lo) * f
            }
        })
        .collect()
}

fn hata(height: f64) -> hetnet_core::Result<(f64, f64)> {
    let out = hata_params(&HataParams {
        base_height: height,
        user_height: USER_HEIGHT,
        frequency: FREQUENCY_MHZ,
        environment: Environment::MetropolitanLargeCity,
    })?;
    Ok((out.beta, out.pathloss_constant))
}

fn tier(lambda: f64, height: f64, t: f64, shadowing: &ScalarDistribution) -> hetnet_core::Result<TierSpec> {
    let (beta, a) = hata(height)?;
    Ok(TierSpec::independent(
        lambda,
        ScalarDistribution::constant(1.0)?,
        shadowing.clone(),
        ScalarDistribution::constant(a)?,
        ScalarDistribution::constant(beta)?,
        ScalarDistribution::constant(t)?,
    ))
}

/// Mean-one log-normal shadowing, or none when `sigma_db = 0`.
pub fn shadowing(sigma_db: f64) -> hetnet_core::Result<ScalarDistribution> {
    if sigma_db == 0.0 {
        ScalarDistribution::constant(1.0)
    } else {
        ScalarDistribution::lognormal_mean_one_db(sigma_db)
    }
}

pub fn two_tier(sigma_db: f64) -> hetnet_core::Result<NetworkModel> {
    let s = shadowing(sigma_db)?;
    NetworkModel::new(vec![tier(DENSITIES[0], HEIGHTS[0], 1.0, &s)?, tier(DENSITIES[1], HEIGHTS[1], 2.0, &s)?])
}

pub fn single_tier(sigma_db: f64) -> hetnet_core::Result<NetworkModel> {
    let h = average_height(&DENSITIES, &HEIGHTS)?;
    NetworkModel::single(tier(DENSITIES.iter().sum(), h, 1.0, &shadowing(sigma_db)?)?)
}

/// Reference exponent: the single tier's.
pub fn beta_prime() -> hetnet_core::Result<f64> {
    Ok(hata(average_height(&DENSITIES, &HEIGHTS)?)?.0)
}

fn curve(name: &'static str, model: &NetworkModel, r: &[f64]) -> hetnet_core::Result<Curve> {
    let iso = isotropic_representation(model, beta_prime()?)?;
    let density = a_corrected_density(&iso);
    let tiers = model.tiers().len();
    let mut per_tier = vec![vec![0.0; r.len()]; tiers];
    for (term, law) in iso.terms().iter().zip(&density.terms) {
        for (i, &x) in r.iter().enumerate() {
            per_tier[term.tier][i] += law.coefficient * x.powf(law.exponent);
        }
    }
    Ok(Curve { name, r: r.to_vec(), phi: r.iter().map(|&x| density.eval(x)).collect(), per_tier })
}

/// The four curves: two-tier and single-tier, unshadowed and shadowed.
pub fn figure1_curves(opts: &Figure1Options) -> hetnet_core::Result<Vec<Curve>> {
    let r = grid(opts.r_min, opts.r_max, opts.points, opts.log_grid);
    Ok(vec![
        curve("two_tier_no_shadowing", &two_tier(0.0)?, &r)?,
        curve("two_tier_shadowing", &two_tier(opts.sigma_db)?, &r)?,
        curve("single_tier_no_shadowing", &single_tier(0.0)?, &r)?,
        curve("single_tier_shadowing", &single_tier(opts.sigma_db)?, &r)?,
    ])
}

/// Write `figure1_<name>.csv` for every curve; columns `r, phi, phi_1[, phi_2]`.
pub fn write_figure1(dir: &Path, curves: &[Curve]) -> Result<Vec<std::path::PathBuf>, crate::AppError> {
    std::fs::create_dir_all(dir).map_err(|e| crate::AppError::io(dir, e))?;
    let mut written = Vec::new();
    for c in curves {
        let path = dir.join(format!("figure1_{}.csv", c.name));
        let mut header = vec!["r".to_string(), "phi".to_string()];
        header.extend((1..=c.per_tier.len()).map(|k| format!("phi_{k}")));
        let rows: Vec<Vec<f64>> = (0..c.r.len())
            .map(|i| {
                let mut row = vec![c.r[i], c.phi[i]];
                row.extend(c.per_tier.iter().map(|t| t[i]));
                row
            })
            .collect();
        let file = crate::io::create(&path).map_err(|e| crate::AppError::io(&path, e))?;
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        crate::io::write_table(file, &header, &rows)?;
        written.push(path);
    }
    Ok(written)
}
