//! CSV and JSON artifacts.
//!
//! Reals are written as `{:.16e}` (17 significant digits), which parses back to
//! the identical `f64`.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use hetnet_core::gof::{GofReport, VerdictReport};
use hetnet_core::{CompositeMark, PropagationPoint, PropagationSample, SampleMeta};
use serde::{Deserialize, Serialize};

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a numeric table with a header row.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt_real(x)))?;
    }
    w.flush()?;
    Ok(())
}

/// Read a numeric table written by [`write_table`].
pub fn read_table<R: Read>(input: R) -> csv::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| csv::Error::from(io::Error::new(io::ErrorKind::InvalidData, e))))
            .collect::<csv::Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// One line of a samples file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub y: f64,
    pub t: f64,
    pub tier: usize,
    pub rep: u64,
}

/// Sidecar metadata of a samples file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplesMeta {
    pub seed: u64,
    pub mode: String,
    pub replications: u64,
    pub s_max: f64,
    pub epsilon: f64,
    /// Simulation disk radius `R`.
    pub radius: Option<f64>,
    /// Bound on the expected number of in-window points missed per replication.
    pub missed_mass: f64,
    /// `Λ(s_max)`.
    pub lambda_s_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_prime: Option<f64>,
}

/// `samples.csv` → `samples.csv.meta.json`.
pub fn meta_path(samples: &Path) -> PathBuf {
    let mut s = samples.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn write_samples<W: Write>(out: W, samples: &[PropagationSample]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["y", "t", "tier", "rep"])?;
    for s in samples {
        let rep = s.meta.replication.to_string();
        for p in &s.points {
            w.write_record([fmt_real(p.y).as_str(), fmt_real(p.mark.t).as_str(), p.mark.tier.to_string().as_str(), rep.as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_sample_rows<R: Read>(input: R) -> csv::Result<Vec<SampleRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Rebuild per-replication samples. Replications without points are kept as
/// empty samples. Per-point `S̃` and `β` are not stored and come back as
/// `NaN`.
pub fn samples_from_rows(rows: &[SampleRow], meta: &SamplesMeta) -> Vec<PropagationSample> {
    let mut by_rep: Vec<Vec<PropagationPoint>> = vec![Vec::new(); meta.replications as usize];
    for r in rows {
        if let Some(v) = by_rep.get_mut(r.rep as usize) {
            v.push(PropagationPoint { y: r.y, mark: CompositeMark { s_tilde: f64::NAN, beta: f64::NAN, t: r.t, tier: r.tier } });
        }
    }
    by_rep
        .into_iter()
        .enumerate()
        .map(|(i, pts)| {
            let m = SampleMeta { seed: meta.seed, replication: i as u64, radius: meta.radius, missed_mass: meta.missed_mass };
            PropagationSample::new(pts, meta.s_max, m)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinJson {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<f64>,
    pub expected: f64,
    pub observed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub method: String,
    pub statistic: f64,
    /// `null` when inconclusive.
    pub p_value: Option<f64>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dof: Option<f64>,
    pub bins: Vec<BinJson>,
    /// `consistent`, `rejected` or `inconclusive` at `alpha`.
    pub verdict: String,
    pub alpha: f64,
}

impl ReportJson {
    pub fn new(r: &GofReport, alpha: f64) -> Self {
        let verdict = match r.p_value {
            None => "inconclusive",
            Some(p) if p > alpha => "consistent",
            Some(_) => "rejected",
        };
        Self {
            method: r.method.as_str().into(),
            statistic: r.statistic,
            p_value: r.p_value,
            n: r.n_points,
            dof: r.dof,
            bins: r
                .bins
                .iter()
                .map(|b| BinJson { lo: b.lo, hi: b.hi, category: b.category, expected: b.expected, observed: b.observed })
                .collect(),
            verdict: verdict.into(),
            alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub verdict: String,
    pub max_rel_diff: Option<f64>,
    pub worst_s: Option<f64>,
    pub worst_t: Option<f64>,
    pub empirical_consistent: Option<bool>,
    pub reports: Vec<(String, ReportJson)>,
}

impl VerdictJson {
    pub fn new(r: &VerdictReport, alpha: f64) -> Self {
        Self {
            verdict: r.verdict.as_str().into(),
            max_rel_diff: r.max_rel_diff,
            worst_s: r.worst.map(|w| w.0),
            // JSON has no infinity; t = ∞ is reported as null.
            worst_t: r.worst.map(|w| w.1).filter(|t| t.is_finite()),
            empirical_consistent: r.empirical_consistent,
            reports: r.reports.iter().map(|(k, v)| (k.clone(), ReportJson::new(v, alpha))).collect(),
        }
    }
}

pub fn write_json<T: Serialize, W: Write>(mut out: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()
}
