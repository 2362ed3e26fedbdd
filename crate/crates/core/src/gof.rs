//! Goodness-of-fit tests for propagation samples.
//!
//! * [`time_change_ks`]: `Y ↦ Λ(Y)/Λ(s_max)` makes the points of a Poisson
//!   process with intensity `Λ` i.i.d. uniform given their number; the
//!   Kolmogorov–Smirnov distance to the uniform law is the statistic.
//! * [`binned_chi2`]: pooled Poisson counts per bin against `reps · ΔΛ`.
//! * [`mark_consistency`]: mark categories per radial bin of an isotropic
//!   model against the mixture weights `p_j(r)`.
//! * [`equivalence_verdict`]: analytic comparison of two intensity measures,
//!   optionally backed by Monte Carlo cross-tests.
//!
//! p-values are clamped to `[1e-16, 1]`; a test on zero points is reported as
//! inconclusive (`p_value = None`).

use alloc::string::String;
use alloc::vec::Vec;
use num_traits::Float;

use crate::equivalence::{default_beta_prime, IsotropicModel};
use crate::intensity::IntensityMeasure;
use crate::model::{NetworkModel, PropagationSample};
use crate::simulate::{replicate, rng::splitmix64, SimMode, SimPlan, Sampler};
use crate::specfun::{gamma_q, normal_quantile};
use crate::{Error, Result};

/// Smallest reported p-value.
pub const P_FLOOR: f64 = 1e-16;

/// Smallest expected count of a chi-square cell.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GofMethod {
    TimeChangeKs,
    TimeRescalingKs,
    TwoSampleKs,
    BinnedChi2,
    MarkChi2,
}

impl GofMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            GofMethod::TimeChangeKs => "time-change-ks",
            GofMethod::TimeRescalingKs => "time-rescaling-ks",
            GofMethod::TwoSampleKs => "two-sample-ks",
            GofMethod::BinnedChi2 => "binned-chi2",
            GofMethod::MarkChi2 => "mark-chi2",
        }
    }
}

/// One cell of a chi-square table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinRow {
    pub lo: f64,
    pub hi: f64,
    /// Mark value of the cell, for mark tests.
    pub category: Option<f64>,
    pub expected: f64,
    pub observed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    pub method: GofMethod,
    pub statistic: f64,
    /// `None` when the test is inconclusive (no points).
    pub p_value: Option<f64>,
    pub n_points: usize,
    /// Degrees of freedom of chi-square tests.
    pub dof: Option<f64>,
    pub bins: Vec<BinRow>,
}

impl GofReport {
    pub fn is_inconclusive(&self) -> bool {
        self.p_value.is_none()
    }

    /// True when the test does not reject at level `alpha`. Inconclusive
    /// reports do not pass.
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value.is_some_and(|p| p > alpha)
    }
}

fn clamp_p(p: f64) -> f64 {
    if p.is_nan() {
        return P_FLOOR;
    }
    p.clamp(P_FLOOR, 1.0)
}

/// Cumulative unmarked intensity `Λ(s)`.
pub trait CumulativeIntensity {
    fn cumulative(&self, s: f64) -> f64;
}

impl CumulativeIntensity for IntensityMeasure {
    fn cumulative(&self, s: f64) -> f64 {
        self.marginal(s)
    }
}

impl CumulativeIntensity for IsotropicModel {
    fn cumulative(&self, s: f64) -> f64 {
        self.intensity(s, f64::INFINITY).unwrap_or(f64::NAN)
    }
}

/// Kolmogorov survival function `Q(x) = P(K > x) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²x²}`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    if x < 1.18 {
        // Jacobi theta form, fast for small x.
        let c = core::f64::consts::PI * core::f64::consts::PI / (8.0 * x * x);
        let mut s = 0.0;
        for k in 0..20 {
            let m = (2 * k + 1) as f64;
            s += (-m * m * c).exp();
        }
        return (1.0 - (2.0 * core::f64::consts::PI).sqrt() / x * s).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// `D_n = sup |F_n(u) - u|` for values in `[0,1]`; sorts `u` in place.
pub fn ks_uniform_statistic(u: &mut [f64]) -> f64 {
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in u.iter().enumerate() {
        let i = i as f64;
        d = d.max((i + 1.0) / n - x).max(x - i / n);
    }
    d
}

/// Asymptotic p-value of a KS distance with effective size `n`, using the
/// `(√n + 0.12 + 0.11/√n)` finite-sample scaling.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let rn = n.sqrt();
    clamp_p(kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d))
}

/// Time-changed points `Λ(Y_i)/Λ(s_max)` of one sample.
pub fn time_changed<I: CumulativeIntensity + ?Sized>(sample: &PropagationSample, im: &I) -> Vec<f64> {
    let total = im.cumulative(sample.s_max);
    sample.ys().map(|y| (im.cumulative(y) / total).clamp(0.0, 1.0)).collect()
}

fn ks_report(mut u: Vec<f64>) -> GofReport {
    let n = u.len();
    if n == 0 {
        return GofReport { method: GofMethod::TimeChangeKs, statistic: 0.0, p_value: None, n_points: 0, dof: None, bins: Vec::new() };
    }
    let d = ks_uniform_statistic(&mut u);
    GofReport { method: GofMethod::TimeChangeKs, statistic: d, p_value: Some(ks_p_value(d, n as f64)), n_points: n, dof: None, bins: Vec::new() }
}

/// Time-change KS test of one sample against `Λ`.
pub fn time_change_ks<I: CumulativeIntensity + ?Sized>(sample: &PropagationSample, im: &I) -> GofReport {
    ks_report(time_changed(sample, im))
}

/// Time-change KS on the pooled transformed points of several replications.
/// Given the total count, the pooled values are still i.i.d. uniform.
pub fn time_change_ks_pooled<I: CumulativeIntensity + ?Sized>(samples: &[PropagationSample], im: &I) -> GofReport {
    ks_report(samples.iter().flat_map(|s| time_changed(s, im)).collect())
}

/// `1 - exp(-(Λ(Y_i) - Λ(Y_{i-1})))` for consecutive points, with `Y_0 = 0`.
pub fn rescaled_gaps<I: CumulativeIntensity + ?Sized>(sample: &PropagationSample, im: &I) -> Vec<f64> {
    let mut prev = 0.0;
    sample
        .ys()
        .map(|y| {
            let tau = im.cumulative(y);
            let u = -(-(tau - prev)).exp_m1();
            prev = tau;
            u
        })
        .collect()
}

/// Time-rescaling KS test: the gaps of `Λ(Y_i)` are unit exponentials under
/// the null, unconditionally on the count, so unlike [`time_change_ks`] this
/// test detects a misspecified overall rate. The window edge censors the last
/// gap, which biases the statistic by `O(1/n)` per replication.
pub fn time_rescaling_ks_pooled<I: CumulativeIntensity + ?Sized>(samples: &[PropagationSample], im: &I) -> GofReport {
    let r = ks_report(samples.iter().flat_map(|s| rescaled_gaps(s, im)).collect());
    GofReport { method: GofMethod::TimeRescalingKs, ..r }
}

/// Two-sample KS test on raw values.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> GofReport {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return GofReport { method: GofMethod::TwoSampleKs, statistic: 0.0, p_value: None, n_points: n + m, dof: None, bins: Vec::new() };
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n + m) as f64;
    GofReport { method: GofMethod::TwoSampleKs, statistic: d, p_value: Some(ks_p_value(d, ne)), n_points: n + m, dof: None, bins: Vec::new() }
}

/// Two-sample KS on pooled time-changed points of two sets of replications.
pub fn ks_two_sample_time_changed<I: CumulativeIntensity + ?Sized>(a: &[PropagationSample], b: &[PropagationSample], im: &I) -> GofReport {
    let ua: Vec<f64> = a.iter().flat_map(|s| time_changed(s, im)).collect();
    let ub: Vec<f64> = b.iter().flat_map(|s| time_changed(s, im)).collect();
    ks_two_sample(&ua, &ub)
}

/// Expected and observed pooled counts on bins `(e_i, e_{i+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinTable {
    pub edges: Vec<f64>,
    pub expected: Vec<f64>,
    pub observed: Vec<u64>,
}

impl BinTable {
    pub fn from_samples<I: CumulativeIntensity + ?Sized>(samples: &[PropagationSample], im: &I, edges: &[f64]) -> Result<Self> {
        if edges.len() < 3 {
            return Err(Error::Invalid("need at least two bins".into()));
        }
        if edges.windows(2).any(|w| !(w[0] < w[1])) || !(edges[0] >= 0.0) {
            return Err(Error::Invalid("bin edges must be non-negative and strictly increasing".into()));
        }
        let reps = samples.len() as f64;
        let cum: Vec<f64> = edges.iter().map(|&e| im.cumulative(e)).collect();
        let expected = cum.windows(2).map(|w| reps * (w[1] - w[0])).collect();
        let mut observed = alloc::vec![0u64; edges.len() - 1];
        for y in samples.iter().flat_map(|s| s.ys()) {
            if y <= edges[0] || y > edges[edges.len() - 1] {
                continue;
            }
            // First edge ≥ y closes the bin.
            let k = edges.partition_point(|&e| e < y);
            observed[k - 1] += 1;
        }
        Ok(Self { edges: edges.to_vec(), expected, observed })
    }

    /// Sum adjacent bins so that only the edges in `keep` remain. `keep` must
    /// be a subsequence of the current edges sharing both end points.
    pub fn coarsen(&self, keep: &[f64]) -> Result<Self> {
        if keep.len() < 2 || keep[0] != self.edges[0] || keep[keep.len() - 1] != self.edges[self.edges.len() - 1] {
            return Err(Error::Invalid("coarse edges must share the end points".into()));
        }
        let mut expected = Vec::new();
        let mut observed = Vec::new();
        let mut k = 0;
        for w in keep.windows(2) {
            let (mut e, mut o) = (0.0, 0u64);
            while k < self.expected.len() && self.edges[k] < w[1] {
                if self.edges[k] < w[0] {
                    return Err(Error::Invalid("coarse edges are not a subset of the table edges".into()));
                }
                e += self.expected[k];
                o += self.observed[k];
                k += 1;
            }
            if self.edges[k] != w[1] {
                return Err(Error::Invalid("coarse edges are not a subset of the table edges".into()));
            }
            expected.push(e);
            observed.push(o);
        }
        Ok(Self { edges: keep.to_vec(), expected, observed })
    }

    /// Merge adjacent bins left to right until every expected count is at
    /// least `min_expected`; a short tail joins the previous bin.
    pub fn merged(&self, min_expected: f64) -> Self {
        let mut keep = alloc::vec![self.edges[0]];
        let mut acc = 0.0;
        for (k, e) in self.expected.iter().enumerate() {
            acc += e;
            if acc >= min_expected {
                keep.push(self.edges[k + 1]);
                acc = 0.0;
            }
        }
        let last = self.edges[self.edges.len() - 1];
        if *keep.last().unwrap() != last {
            if keep.len() > 1 {
                keep.pop();
            }
            keep.push(last);
        }
        self.coarsen(&keep).unwrap_or_else(|_| self.clone())
    }

    /// Pearson statistic over Poisson cells. Degrees of freedom equal the
    /// number of cells: the expected counts are fully specified, not fitted
    /// to the observed total.
    pub fn chi2(&self) -> Result<GofReport> {
        let cells = self.expected.len();
        if cells < 2 {
            return Err(Error::Invalid(alloc::format!("{cells} usable bin(s); need at least two")));
        }
        let mut stat = 0.0;
        let mut bins = Vec::with_capacity(cells);
        for k in 0..cells {
            let (e, o) = (self.expected[k], self.observed[k]);
            if e > 0.0 {
                let diff = o as f64 - e;
                stat += diff * diff / e;
            } else if o > 0 {
                stat = f64::INFINITY;
            }
            bins.push(BinRow { lo: self.edges[k], hi: self.edges[k + 1], category: None, expected: e, observed: o });
        }
        let dof = cells as f64;
        Ok(GofReport {
            method: GofMethod::BinnedChi2,
            statistic: stat,
            p_value: Some(chi2_survival(stat, dof)),
            n_points: self.observed.iter().sum::<u64>() as usize,
            dof: Some(dof),
            bins,
        })
    }
}

/// Chi-square survival function, clamped to `[1e-16, 1]`.
pub fn chi2_survival(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if !x.is_finite() {
        return P_FLOOR;
    }
    clamp_p(gamma_q(0.5 * dof, 0.5 * x).unwrap_or(f64::NAN))
}

/// Binned chi-square test of pooled replications against `Λ`, merging bins
/// with fewer than five expected points.
pub fn binned_chi2<I: CumulativeIntensity + ?Sized>(samples: &[PropagationSample], im: &I, edges: &[f64]) -> Result<GofReport> {
    if samples.is_empty() {
        return Err(Error::Invalid("no samples".into()));
    }
    BinTable::from_samples(samples, im, edges)?.merged(MIN_EXPECTED).chi2()
}

/// `n` log-spaced edges from `lo` to `hi`, with `0` prepended when `with_zero`.
pub fn log_edges(lo: f64, hi: f64, n: usize, with_zero: bool) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    if with_zero {
        out.push(0.0);
    }
    let (a, b) = (lo.ln(), hi.ln());
    for i in 0..n {
        let x = if i + 1 == n { hi } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() };
        out.push(x);
    }
    out
}

/// Observed mark categories in one radial bin.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkBin {
    pub lo: f64,
    pub hi: f64,
    pub n: u64,
    /// `(mark value, expected proportion, observed count)`.
    pub cells: Vec<(f64, f64, u64)>,
}

impl MarkBin {
    /// True when every observed proportion lies within `z` binomial standard
    /// errors of its expected value.
    pub fn within(&self, z: f64) -> bool {
        if self.n == 0 {
            return true;
        }
        let n = self.n as f64;
        self.cells.iter().all(|&(_, p, o)| ((o as f64 / n) - p).abs() <= z * (p * (1.0 - p) / n).sqrt())
    }
}

/// Normal critical value for `m` simultaneous two-sided tests at family level `alpha`.
pub fn simultaneous_z(alpha: f64, m: usize) -> Result<f64> {
    normal_quantile(1.0 - alpha / (2.0 * m.max(1) as f64))
}

/// Stations of each component of `iso` in the annulus `lo < r ≤ hi`.
fn annulus_masses(iso: &IsotropicModel, lo: f64, hi: f64) -> Vec<f64> {
    iso.terms()
        .iter()
        .map(|t| {
            let k = t.exponent + 2.0;
            2.0 * core::f64::consts::PI * t.density * (hi.powf(k) - lo.powf(k)) / k
        })
        .collect()
}

/// Expected mark proportions over the annulus `lo < r ≤ hi`, integrated exactly
/// over the annulus.
pub fn annulus_mark_proportions(iso: &IsotropicModel, atoms: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let masses = annulus_masses(iso, lo, hi);
    let total: f64 = masses.iter().sum();
    atoms
        .iter()
        .map(|&c| {
            iso.terms()
                .iter()
                .zip(&masses)
                .map(|(t, m)| m * t.mark.atoms().map_or(0.0, |a| a.iter().filter(|x| x.0 == c).map(|x| x.1).sum()))
                .sum::<f64>()
                / total
        })
        .collect()
}

fn mark_atoms(iso: &IsotropicModel) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for t in iso.terms() {
        for (v, _) in t.mark.atoms().ok_or(Error::Unsupported("mark tests need discrete marks"))? {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Mark counts per radial bin, with bins merged until every category with
/// positive probability expects at least five points.
pub fn mark_table(samples: &[PropagationSample], iso: &IsotropicModel, radial_edges: &[f64]) -> Result<Vec<MarkBin>> {
    let atoms = mark_atoms(iso)?;
    if radial_edges.len() < 2 || radial_edges.windows(2).any(|w| !(w[0] < w[1])) || !(radial_edges[0] >= 0.0) {
        return Err(Error::Invalid("radial edges must be non-negative and strictly increasing".into()));
    }
    let nb = radial_edges.len() - 1;
    let bp = iso.beta_prime();
    let mut counts = alloc::vec![alloc::vec![0u64; atoms.len()]; nb];
    for p in samples.iter().flat_map(|s| s.points.iter()) {
        let r = p.y.powf(1.0 / bp);
        if r <= radial_edges[0] || r > radial_edges[nb] {
            continue;
        }
        let b = radial_edges.partition_point(|&e| e < r) - 1;
        let c = atoms
            .iter()
            .position(|&a| (a - p.mark.t).abs() <= 1e-12 * a.abs().max(1.0))
            .ok_or_else(|| Error::Invalid(alloc::format!("mark {} is not an atom of the model", p.mark.t)))?;
        counts[b][c] += 1;
    }

    let mut out: Vec<MarkBin> = Vec::new();
    let mut start = 0;
    let mut acc = alloc::vec![0u64; atoms.len()];
    for b in 0..nb {
        for (a, c) in acc.iter_mut().zip(&counts[b]) {
            *a += c;
        }
        let (lo, hi) = (radial_edges[start], radial_edges[b + 1]);
        let props = annulus_mark_proportions(iso, &atoms, lo, hi);
        let n: u64 = acc.iter().sum();
        let enough = props.iter().all(|&p| p == 0.0 || n as f64 * p >= MIN_EXPECTED);
        if enough || b + 1 == nb {
            let mut bin = MarkBin { lo, hi, n, cells: Vec::new() };
            if !enough {
                // Short tail: fold into the previous bin if there is one.
                if let Some(prev) = out.pop() {
                    bin.lo = prev.lo;
                    bin.n += prev.n;
                    for (a, cell) in acc.iter_mut().zip(&prev.cells) {
                        *a += cell.2;
                    }
                }
            }
            let props = annulus_mark_proportions(iso, &atoms, bin.lo, bin.hi);
            bin.cells = atoms.iter().zip(&props).zip(&acc).map(|((&t, &p), &o)| (t, p, o)).collect();
            out.push(bin);
            start = b + 1;
            acc.iter_mut().for_each(|a| *a = 0);
        }
    }
    Ok(out)
}

/// Chi-square test of mark categories per radial bin, pooled across bins.
pub fn mark_consistency(samples: &[PropagationSample], iso: &IsotropicModel, radial_edges: &[f64]) -> Result<GofReport> {
    let table = mark_table(samples, iso, radial_edges)?;
    let mut stat = 0.0;
    let mut dof = 0.0;
    let mut n_points = 0;
    let mut bins = Vec::new();
    for bin in &table {
        n_points += bin.n as usize;
        let n = bin.n as f64;
        let live = bin.cells.iter().filter(|c| c.1 > 0.0).count();
        if bin.n > 0 && live > 1 {
            dof += (live - 1) as f64;
        }
        for &(t, p, o) in &bin.cells {
            let e = n * p;
            if e > 0.0 && live > 1 {
                let d = o as f64 - e;
                stat += d * d / e;
            } else if e == 0.0 && o > 0 {
                stat = f64::INFINITY;
            }
            bins.push(BinRow { lo: bin.lo, hi: bin.hi, category: Some(t), expected: e, observed: o });
        }
    }
    let p_value = if n_points == 0 {
        None
    } else if dof == 0.0 {
        Some(if stat == 0.0 { 1.0 } else { P_FLOOR })
    } else {
        Some(chi2_survival(stat, dof))
    };
    Ok(GofReport { method: GofMethod::MarkChi2, statistic: stat, p_value, n_points, dof: Some(dof), bins })
}

/// Second model of an equivalence check.
#[derive(Debug, Clone)]
pub enum Candidate {
    Network(NetworkModel),
    Isotropic(IsotropicModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    EquivalentAnalytic,
    ConsistentEmpirical,
    Rejected,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::EquivalentAnalytic => "equivalent-analytic",
            Verdict::ConsistentEmpirical => "consistent-empirical",
            Verdict::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictOptions {
    /// Window edges `s` at which the intensities are compared.
    pub grid: Vec<f64>,
    pub rel_tol: f64,
    pub analytic: bool,
    pub empirical: bool,
    pub alpha: f64,
    /// Reference exponent for isotropic sampling of network models;
    /// defaults to the tiers' mean exponent.
    pub beta_prime: Option<f64>,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self { grid: log_edges(1e-3, 1e6, 91, false), rel_tol: 1e-10, analytic: true, empirical: false, alpha: 0.01, beta_prime: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictReport {
    pub verdict: Verdict,
    /// Largest relative difference found on the grid.
    pub max_rel_diff: Option<f64>,
    /// `(s, t)` where it occurred.
    pub worst: Option<(f64, f64)>,
    /// Labelled Monte Carlo sub-reports.
    pub reports: Vec<(String, GofReport)>,
    /// Whether every Monte Carlo sub-test passed at `alpha`.
    pub empirical_consistent: Option<bool>,
}

enum Side<'a> {
    Measure(IntensityMeasure),
    Iso(&'a IsotropicModel),
}

impl Side<'_> {
    fn lambda(&self, s: f64, t: f64) -> Result<f64> {
        match self {
            Side::Measure(m) => Ok(m.lambda(s, t)),
            Side::Iso(i) => i.intensity(s, t),
        }
    }

    fn atoms(&self) -> Vec<f64> {
        let terms: Vec<&crate::model::ScalarDistribution> = match self {
            Side::Measure(m) => m.terms().iter().map(|t| &t.mark).collect(),
            Side::Iso(i) => i.terms().iter().map(|t| &t.mark).collect(),
        };
        terms.into_iter().filter_map(|d| d.atoms()).flatten().map(|a| a.0).collect()
    }
}

impl CumulativeIntensity for Side<'_> {
    fn cumulative(&self, s: f64) -> f64 {
        self.lambda(s, f64::INFINITY).unwrap_or(f64::NAN)
    }
}

/// Decide whether `a` and `b` induce the same propagation process.
///
/// The analytic path compares `Λ_a(s,t)` and `Λ_b(s,t)` on `opts.grid` at
/// every mark atom of either model (and `t = ∞`). The empirical path samples
/// both models with `plan` (the second from a seed derived from
/// `plan.master_seed`) and cross-tests each sample against the other model's
/// intensity, plus a two-sample KS on time-changed points.
pub fn equivalence_verdict(a: &NetworkModel, b: &Candidate, plan: &SimPlan, opts: &VerdictOptions) -> Result<VerdictReport> {
    let side_a = Side::Measure(IntensityMeasure::new(a)?);
    let side_b = match b {
        Candidate::Network(m) => Side::Measure(IntensityMeasure::new(m)?),
        Candidate::Isotropic(i) => Side::Iso(i),
    };

    let mut report = VerdictReport { verdict: Verdict::Rejected, max_rel_diff: None, worst: None, reports: Vec::new(), empirical_consistent: None };
    let mut analytic_ok = None;
    if opts.analytic {
        let mut marks = side_a.atoms();
        marks.extend(side_b.atoms());
        marks.push(f64::INFINITY);
        let mut worst = (0.0, (f64::NAN, f64::NAN));
        for &s in &opts.grid {
            for &t in &marks {
                let (x, y) = (side_a.lambda(s, t)?, side_b.lambda(s, t)?);
                let scale = x.abs().max(y.abs());
                let rel = if scale == 0.0 { 0.0 } else { (x - y).abs() / scale };
                if !(rel <= worst.0) {
                    worst = (rel, (s, t));
                }
            }
        }
        report.max_rel_diff = Some(worst.0);
        report.worst = Some(worst.1);
        analytic_ok = Some(worst.0 <= opts.rel_tol);
    }

    if opts.empirical {
        let beta_prime = opts.beta_prime.unwrap_or_else(|| default_beta_prime(a));
        let sampler_a = Sampler::for_plan(a, plan, beta_prime)?;
        let plan_b = SimPlan { master_seed: splitmix64(plan.master_seed ^ 0xB), ..*plan };
        let sampler_b = match b {
            Candidate::Network(m) => Sampler::for_plan(m, &plan_b, beta_prime)?,
            Candidate::Isotropic(i) => Sampler::isotropic(i, &SimPlan { mode: SimMode::Isotropic, ..plan_b })?,
        };
        let xs = replicate(&sampler_a, plan);
        let ys = replicate(&sampler_b, &plan_b);
        report.reports.push(("a-vs-b-intensity".into(), time_change_ks_pooled(&xs, &side_b)));
        report.reports.push(("b-vs-a-intensity".into(), time_change_ks_pooled(&ys, &side_a)));
        report.reports.push(("two-sample".into(), ks_two_sample_time_changed(&xs, &ys, &side_a)));
        report.empirical_consistent = Some(report.reports.iter().all(|(_, r)| r.passes(opts.alpha)));
    }

    report.verdict = match (analytic_ok, report.empirical_consistent) {
        (Some(true), _) => Verdict::EquivalentAnalytic,
        (Some(false), _) => Verdict::Rejected,
        (None, Some(true)) => Verdict::ConsistentEmpirical,
        (None, Some(false)) => Verdict::Rejected,
        (None, None) => return Err(Error::Invalid("enable the analytic or the empirical check".into())),
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::isotropic_representation;
    use crate::model::{CompositeMark, PropagationPoint, SampleMeta, ScalarDistribution, TierSpec};

    fn meta() -> SampleMeta {
        SampleMeta { seed: 0, replication: 0, radius: None, missed_mass: 0.0 }
    }

    fn sample_at(ys: &[f64], t: f64, s_max: f64) -> PropagationSample {
        let pts = ys.iter().map(|&y| PropagationPoint { y, mark: CompositeMark { s_tilde: 1.0, beta: 2.0, t, tier: 0 } }).collect();
        PropagationSample::new(pts, s_max, meta())
    }

    fn unit_measure() -> IntensityMeasure {
        IntensityMeasure::new(&NetworkModel::new_with_free_space(alloc::vec![TierSpec::deterministic(1.0, 1.0, 2.0, 1.0).unwrap()]).unwrap()).unwrap()
    }

    #[test]
    fn kolmogorov_reference() {
        // scipy.special.kolmogorov
        for (x, q) in [(0.5, 0.9639452436648751), (1.0, 0.26999967167735456), (1.36, 0.049485876755377876), (0.2, 0.999999999999495)] {
            assert!((kolmogorov_survival(x) - q).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn chi2_reference() {
        // scipy.stats.chi2.sf
        assert!((chi2_survival(3.0, 4.0) - 0.5578254003710748).abs() < 1e-13);
        assert!((chi2_survival(25.0, 10.0) - 0.005345505487134069).abs() < 1e-13);
        assert_eq!(chi2_survival(1e6, 2.0), P_FLOOR);
    }

    #[test]
    fn perfect_quantiles() {
        // Λ(s) = πs on (0, 1]: Y at (i - 1/2)/n gives D = 1/(2n).
        let n = 50;
        let ys: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let r = time_change_ks(&sample_at(&ys, 1.0, 1.0), &unit_measure());
        assert!((r.statistic - 0.5 / n as f64).abs() < 1e-14);
        assert!(r.p_value.unwrap() > 0.999);
    }

    #[test]
    fn empty_sample_inconclusive() {
        let r = time_change_ks(&sample_at(&[], 1.0, 1.0), &unit_measure());
        assert!(r.is_inconclusive());
        assert!(!r.passes(0.01));
    }

    #[test]
    fn two_sample_identical() {
        let a = [0.1, 0.4, 0.7];
        let r = ks_two_sample(&a, &a);
        assert_eq!(r.statistic, 0.0);
        let r = ks_two_sample(&[0.1, 0.2], &[0.8, 0.9]);
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn unit_bins_expected() {
        let im = unit_measure();
        let s = sample_at(&[10.0, 30.0, 60.0, 90.0], 1.0, 100.0);
        let t = BinTable::from_samples(&[s], &im, &[0.0, 25.0, 50.0, 75.0, 100.0]).unwrap();
        for e in &t.expected {
            assert!((e - 25.0 * core::f64::consts::PI).abs() < 1e-12);
        }
        assert_eq!(t.observed, [1, 1, 1, 1]);
    }

    #[test]
    fn exact_counts_give_zero() {
        let t = BinTable { edges: alloc::vec![0.0, 1.0, 2.0], expected: alloc::vec![7.0, 9.0], observed: alloc::vec![7, 9] };
        let r = t.chi2().unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, Some(1.0));
    }

    #[test]
    fn merge_small_bins() {
        let t = BinTable {
            edges: alloc::vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            expected: alloc::vec![2.0, 4.0, 6.0, 1.0, 1.0],
            observed: alloc::vec![1, 2, 3, 4, 5],
        };
        let m = t.merged(5.0);
        assert_eq!(m.edges, [0.0, 2.0, 5.0]);
        assert_eq!(m.expected, [6.0, 8.0]);
        assert_eq!(m.observed, [3, 12]);
        let one = BinTable { edges: alloc::vec![0.0, 1.0, 2.0], expected: alloc::vec![1.0, 1.0], observed: alloc::vec![1, 1] };
        assert!(one.merged(5.0).chi2().is_err());
    }

    #[test]
    fn coarsen_rejects_foreign_edges() {
        let t = BinTable { edges: alloc::vec![0.0, 1.0, 2.0, 3.0], expected: alloc::vec![5.0; 3], observed: alloc::vec![5; 3] };
        assert!(t.coarsen(&[0.0, 1.5, 3.0]).is_err());
        assert_eq!(t.coarsen(&[0.0, 2.0, 3.0]).unwrap().observed, [10, 5]);
    }

    #[test]
    fn constant_mark_statistic_zero() {
        let m = NetworkModel::single(TierSpec::deterministic(1.0, 1.0, 4.0, 3.0).unwrap()).unwrap();
        let iso = isotropic_representation(&m, 4.0).unwrap();
        let ys: Vec<f64> = (1..200).map(|i| i as f64 / 10.0).collect();
        let r = mark_consistency(&[sample_at(&ys, 3.0, 20.0)], &iso, &[0.0, 1.0, 1.5, 2.2]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, Some(1.0));
    }

    #[test]
    fn continuous_marks_unsupported() {
        let one = ScalarDistribution::constant(1.0).unwrap();
        let m = NetworkModel::single(TierSpec::independent(
            1.0,
            one.clone(),
            one.clone(),
            one.clone(),
            ScalarDistribution::constant(4.0).unwrap(),
            ScalarDistribution::exponential(1.0).unwrap(),
        ))
        .unwrap();
        let iso = isotropic_representation(&m, 4.0).unwrap();
        assert!(matches!(mark_consistency(&[], &iso, &[0.0, 1.0]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn annulus_proportions_sum_to_one() {
        let m = NetworkModel::new(alloc::vec![
            TierSpec::deterministic(1.8, 1.986e14, 3.638, 1.0).unwrap(),
            TierSpec::deterministic(2.2, 2.148e13, 3.180, 2.0).unwrap(),
        ])
        .unwrap();
        let iso = isotropic_representation(&m, 3.307).unwrap();
        let p = annulus_mark_proportions(&iso, &[1.0, 2.0], 1e-3, 2e-3);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
        // Narrow annulus: the proportions approach p_j at the centre.
        let w = iso.weights(1.5e-3).unwrap();
        let p = annulus_mark_proportions(&iso, &[1.0, 2.0], 1.5e-3 * (1.0 - 1e-7), 1.5e-3 * (1.0 + 1e-7));
        assert!((p[0] - w[0]).abs() < 1e-10);
    }

    #[test]
    fn verdict_self_and_scaled() {
        let m = NetworkModel::single(TierSpec::deterministic(1.0, 1.0, 4.0, 1.0).unwrap()).unwrap();
        let plan = SimPlan::new(10.0, 1e-3, 1, 10, SimMode::Direct).unwrap();
        let opts = VerdictOptions::default();
        let r = equivalence_verdict(&m, &Candidate::Network(m.clone()), &plan, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::EquivalentAnalytic);
        assert_eq!(r.max_rel_diff, Some(0.0));
        let r = equivalence_verdict(&m, &Candidate::Network(m.scaled(1.1).unwrap()), &plan, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Rejected);
        let none = VerdictOptions { analytic: false, ..opts };
        assert!(equivalence_verdict(&m, &Candidate::Network(m.clone()), &plan, &none).is_err());
    }
}
