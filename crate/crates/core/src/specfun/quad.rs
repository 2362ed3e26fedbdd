//! Globally adaptive Gauss–Kronrod (10/21) integration.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;
use num_traits::Float;

use crate::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_324_800,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for [`quad_points`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

/// `∫_a^b f(x) dx` to absolute tolerance `tol`. `b` may be `+∞`.
pub fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let opts = QuadOptions { abs_tol: tol, rel_tol: 0.0, ..QuadOptions::default() };
    quad_points(f, &[a, b], opts)
}

/// Integrate over consecutive segments `points[0]..points[1]..…`, refining
/// globally until `error ≤ max(abs_tol, rel_tol·|I|)`.
///
/// Only the final point may be `+∞`; that segment is mapped onto `[0, 1)` by
/// `x = a + t/(1 - t)`. Interior points are natural places for kinks or peaks.
pub fn quad_points<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: QuadOptions) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Invalid("quadrature needs at least two points".into()));
    }
    for w in points.windows(2) {
        if !(w[0] <= w[1]) || w[0].is_infinite() {
            return Err(Error::Invalid("quadrature points must be increasing and finite (except the last)".into()));
        }
    }
    let last = points.len() - 2;
    let tail_start = if points[last + 1] == f64::INFINITY { Some(points[last]) } else { None };
    let eval = |seg: usize, t: f64| -> f64 {
        match tail_start {
            Some(a) if seg == last => {
                let s = 1.0 - t;
                f(a + t / s) / (s * s)
            }
            _ => f(t),
        }
    };

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for (seg, w) in points.windows(2).enumerate() {
        let (lo, hi) = if tail_start.is_some() && seg == last { (0.0, 1.0) } else { (w[0], w[1]) };
        if lo == hi {
            continue;
        }
        let iv = Interval::new(seg, lo, hi, |t| eval(seg, t));
        total += iv.value;
        total_err += iv.error;
        total_abs += iv.abs;
        heap.push(iv);
    }

    // Below ~100ε·∫|f| the error estimate is dominated by rounding.
    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()).max(100.0 * f64::EPSILON * total_abs) {
        if !total.is_finite() {
            return Err(Error::QuadratureNonConvergence { error: f64::INFINITY, intervals: heap.len() });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureNonConvergence { error: total_err, intervals: heap.len() });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) {
            return Err(Error::QuadratureNonConvergence { error: total_err, intervals: heap.len() });
        }
        let seg = worst.seg;
        let left = Interval::new(seg, worst.lo, mid, |t| eval(seg, t));
        let right = Interval::new(seg, mid, worst.hi, |t| eval(seg, t));
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    Ok(heap.into_vec().iter().map(|iv| iv.value).sum())
}

struct Interval {
    seg: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl Interval {
    fn new<G: Fn(f64) -> f64>(seg: usize, lo: f64, hi: f64, g: G) -> Self {
        let (value, error, abs) = kronrod21(&g, lo, hi);
        Self { seg, lo, hi, value, error, abs }
    }
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
fn kronrod21<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64) -> (f64, f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = g(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    (value, err, res_abs)
}
