//! Command-line interface.
//!
//! Exit codes: 0 success, 2 input error, 3 infeasible simulation plan.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hetnet_core::equivalence::default_beta_prime;
use hetnet_core::gof::{binned_chi2, mark_consistency, time_change_ks_pooled, time_rescaling_ks_pooled, GofReport};
use hetnet_core::hata::{hata_params, Environment, HataParams};
use hetnet_core::simulate::{SimMode, SimPlan, Sampler};
use hetnet_core::{build_intensity, IsotropicModel, NetworkModel};
use serde::Serialize;

use crate::config::parse_model;
use crate::figure::{figure1_curves, grid, write_figure1, Figure1Options};
use crate::io::{self, ReportJson, SamplesMeta};
use crate::parallel::{replicate_parallel, threads_from_env};
use crate::AppError;

/// Refuse simulations expected to hold more points than this, summed over replications.
const MAX_EXPECTED_POINTS: f64 = 1e8;

#[derive(Debug, Parser)]
#[command(name = "hetnet", version, about = "Propagation processes of heterogeneous Poisson networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Original,
    Isotropic,
    Direct,
}

impl From<ModeArg> for SimMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Original => SimMode::Original,
            ModeArg::Isotropic => SimMode::Isotropic,
            ModeArg::Direct => SimMode::Direct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Time-change KS on pooled `Λ(Y)/Λ(s_max)`.
    Ks,
    /// Time-rescaling KS on the gaps of `Λ(Y)`; sensitive to the overall rate.
    KsGaps,
    /// Binned chi-square of pooled counts.
    Chi2,
    /// Mark categories per radial bin of the isotropic representation.
    Marks,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate Λ(s, t).
    Intensity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        s_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Mark argument; omit for the marginal Λ(s).
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        log_grid: bool,
        /// Left end of a log grid (default s_max·1e-6).
        #[arg(long)]
        s_min: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the isotropic representation φ(r) and mark weights.
    Equivalent {
        #[arg(long)]
        config: PathBuf,
        /// Reference exponent (default: mean tier exponent).
        #[arg(long, allow_negative_numbers = true)]
        beta_prime: Option<f64>,
        #[arg(long)]
        r_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Include the E[A^{2/β}]-corrected density column.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        corrected: bool,
        #[arg(long)]
        log_grid: bool,
        /// Left end of a log grid (default r_max·1e-3).
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate replications and write `y,t,tier,rep` plus a `.meta.json` sidecar.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        s_max: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        /// Reference exponent of the isotropic sampler.
        #[arg(long)]
        beta_prime: Option<f64>,
        /// Largest simulation disk radius.
        #[arg(long, default_value_t = hetnet_core::simulate::DEFAULT_RADIUS_CAP)]
        radius_cap: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Test a samples file against a model's intensity.
    Gof {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "ks")]
        method: MethodArg,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Reference exponent for mark tests (default: the sidecar's, else mean tier exponent).
        #[arg(long)]
        beta_prime: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// COST231-Hata exponent and constant (distances in km).
    Hata {
        /// Base-station antenna height, m.
        #[arg(long)]
        height: f64,
        #[arg(long, default_value_t = 1.0)]
        user_height: f64,
        /// Carrier frequency, MHz.
        #[arg(long, default_value_t = 1800.0)]
        freq: f64,
        #[arg(long, default_value = "metropolitan")]
        env: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the four radial-density curves of the two-tier example.
    Figure1 {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        sigma_db: f64,
        #[arg(long, default_value_t = 1e-2)]
        r_min: f64,
        #[arg(long, default_value_t = 10.0)]
        r_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        linear_grid: bool,
    },
}

fn load_model(path: &Path) -> Result<NetworkModel, AppError> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    Ok(parse_model(&text)?)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, AppError> {
    match path {
        Some(p) => Ok(Box::new(io::create(p).map_err(|e| AppError::io(p, e))?)),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn write_json_to<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<(), AppError> {
    let target = path.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    io::write_json(output(path)?, value).map_err(|e| AppError::io(&target, e))
}

fn positive(name: &str, x: f64) -> Result<(), AppError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(AppError::Input(format!("--{name} must be finite and > 0, got {x}")))
    }
}

fn at_least_two(points: usize) -> Result<(), AppError> {
    if points < 2 {
        return Err(AppError::Input(format!("--points must be at least 2, got {points}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct HataJson {
    beta: f64,
    #[serde(rename = "A")]
    a: f64,
    intercept_db: f64,
    warnings: Vec<String>,
}

pub fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Intensity { config, s_max, points, t, log_grid, s_min, out } => {
            let model = load_model(&config)?;
            positive("s-max", s_max)?;
            at_least_two(points)?;
            let im = build_intensity(&model)?;
            let t = t.unwrap_or(f64::INFINITY);
            let s = if log_grid {
                let lo = s_min.unwrap_or(s_max * 1e-6);
                positive("s-min", lo)?;
                grid(lo, s_max, points, true)
            } else {
                grid(0.0, s_max, points, false)
            };
            let rows: Vec<Vec<f64>> = s.iter().map(|&s| vec![s, im.lambda(s, t)]).collect();
            io::write_table(output(&out)?, &["s", "lambda"], &rows)?;
        }
        Command::Equivalent { config, beta_prime, r_max, points, corrected, log_grid, r_min, out } => {
            let model = load_model(&config)?;
            let bp = beta_prime.unwrap_or_else(|| default_beta_prime(&model));
            positive("beta-prime", bp)?;
            positive("r-max", r_max)?;
            at_least_two(points)?;
            let iso = IsotropicModel::from_intensity(&build_intensity(&model)?, bp)?;
            let fixed = hetnet_core::equivalence::a_corrected_density(&iso);
            let r = if log_grid {
                let lo = r_min.unwrap_or(r_max * 1e-3);
                positive("r-min", lo)?;
                grid(lo, r_max, points, true)
            } else {
                (1..=points).map(|i| r_max * i as f64 / points as f64).collect()
            };
            let tiers = model.tiers().len();
            let mut header = vec!["r".to_string(), "phi".to_string()];
            if corrected {
                header.push("phi_corrected".into());
            }
            header.extend((1..=tiers).map(|k| format!("p_{k}")));
            let mut rows = Vec::with_capacity(r.len());
            for &x in &r {
                let mut row = vec![x, iso.phi(x)?];
                if corrected {
                    row.push(fixed.eval(x));
                }
                let mut p = vec![0.0; tiers];
                for (w, term) in iso.weights(x)?.into_iter().zip(iso.terms()) {
                    p[term.tier] += w;
                }
                row.extend(p);
                rows.push(row);
            }
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            io::write_table(output(&out)?, &header, &rows)?;
        }
        Command::Simulate { config, mode, s_max, eps, seed, reps, beta_prime, radius_cap, out } => {
            let model = load_model(&config)?;
            let threads = threads_from_env().map_err(AppError::Input)?;
            let plan = SimPlan { radius_cap, ..SimPlan::new(s_max, eps, seed, reps, mode.into())? };
            plan.validate()?;
            let bp = beta_prime.unwrap_or_else(|| default_beta_prime(&model));
            positive("beta-prime", bp)?;
            let sampler = Sampler::for_plan(&model, &plan, bp)?;
            let lambda_s_max = build_intensity(&model)?.marginal(s_max);
            // The original sampler draws every station in its disk, not only those within s_max.
            let per_rep = match (plan.mode, sampler.truncation()) {
                (SimMode::Original, (Some(r), _)) => lambda_s_max.max(std::f64::consts::PI * r * r * model.total_density()),
                _ => lambda_s_max,
            };
            if per_rep * reps as f64 > MAX_EXPECTED_POINTS {
                return Err(AppError::Input(format!(
                    "about {:.3e} points expected ({per_rep:.3e} per replication); the limit is {MAX_EXPECTED_POINTS:e}, lower --s-max or --reps",
                    per_rep * reps as f64
                )));
            }
            let samples = replicate_parallel(&sampler, &plan, threads);
            let file = io::create(&out).map_err(|e| AppError::io(&out, e))?;
            io::write_samples(file, &samples)?;
            let (radius, missed_mass) = sampler.truncation();
            let meta = SamplesMeta {
                seed,
                mode: plan.mode.as_str().into(),
                replications: reps,
                s_max,
                epsilon: eps,
                radius,
                missed_mass,
                lambda_s_max,
                beta_prime: (plan.mode == SimMode::Isotropic).then_some(bp),
            };
            let meta_path = io::meta_path(&out);
            let file = io::create(&meta_path).map_err(|e| AppError::io(&meta_path, e))?;
            io::write_json(file, &meta).map_err(|e| AppError::io(&meta_path, e))?;
        }
        Command::Gof { samples, config, method, bins, alpha, beta_prime, out } => {
            let model = load_model(&config)?;
            let meta_path = io::meta_path(&samples);
            let meta: SamplesMeta = serde_json::from_str(&fs::read_to_string(&meta_path).map_err(|e| AppError::io(&meta_path, e))?)
                .map_err(|e| AppError::Input(format!("{}: {e}", meta_path.display())))?;
            let file = fs::File::open(&samples).map_err(|e| AppError::io(&samples, e))?;
            let rows = io::read_sample_rows(file)?;
            let samples = io::samples_from_rows(&rows, &meta);
            let im = build_intensity(&model)?;
            if bins < 2 {
                return Err(AppError::Input(format!("--bins must be at least 2, got {bins}")));
            }
            let report = if rows.is_empty() {
                GofReport {
                    method: match method {
                        MethodArg::Ks => hetnet_core::gof::GofMethod::TimeChangeKs,
                        MethodArg::KsGaps => hetnet_core::gof::GofMethod::TimeRescalingKs,
                        MethodArg::Chi2 => hetnet_core::gof::GofMethod::BinnedChi2,
                        MethodArg::Marks => hetnet_core::gof::GofMethod::MarkChi2,
                    },
                    statistic: 0.0,
                    p_value: None,
                    n_points: 0,
                    dof: None,
                    bins: Vec::new(),
                }
            } else {
                match method {
                    MethodArg::Ks => time_change_ks_pooled(&samples, &im),
                    MethodArg::KsGaps => time_rescaling_ks_pooled(&samples, &im),
                    MethodArg::Chi2 => {
                        // Equal expected mass per bin.
                        let total = im.marginal(meta.s_max);
                        let mut edges: Vec<f64> = (0..bins).map(|j| im.inverse(total * j as f64 / bins as f64)).collect();
                        edges.push(meta.s_max);
                        binned_chi2(&samples, &im, &edges)?
                    }
                    MethodArg::Marks => {
                        let bp = beta_prime.or(meta.beta_prime).unwrap_or_else(|| default_beta_prime(&model));
                        let iso = IsotropicModel::from_intensity(&im, bp)?;
                        let r_max = meta.s_max.powf(1.0 / bp);
                        let edges: Vec<f64> = (0..=bins).map(|j| r_max * j as f64 / bins as f64).collect();
                        mark_consistency(&samples, &iso, &edges)?
                    }
                }
            };
            write_json_to(&out, &ReportJson::new(&report, alpha))?;
        }
        Command::Hata { height, user_height, freq, env, out } => {
            let environment: Environment = env.parse()?;
            let h = hata_params(&HataParams { base_height: height, user_height, frequency: freq, environment })?;
            let json = HataJson {
                beta: h.beta,
                a: h.pathloss_constant,
                intercept_db: h.intercept_db,
                warnings: h.warnings.iter().map(ToString::to_string).collect(),
            };
            write_json_to(&out, &json)?;
        }
        Command::Figure1 { out_dir, sigma_db, r_min, r_max, points, linear_grid } => {
            if !(sigma_db >= 0.0) {
                return Err(AppError::Input(format!("--sigma-db must be >= 0, got {sigma_db}")));
            }
            positive("r-min", r_min)?;
            positive("r-max", r_max)?;
            if r_min >= r_max {
                return Err(AppError::Input("--r-min must be below --r-max".into()));
            }
            at_least_two(points)?;
            let opts = Figure1Options { sigma_db, r_min, r_max, points, log_grid: !linear_grid };
            write_figure1(&out_dir, &figure1_curves(&opts)?)?;
        }
    }
    Ok(())
}
