mod common;

use common::{shadowed, two_tier, two_tier_shadowed, unit_model};
use hetnet_core::gof::{
    binned_chi2, ks_two_sample_time_changed, log_edges, mark_table, simultaneous_z, time_change_ks, time_change_ks_pooled,
    time_rescaling_ks_pooled, BinTable,
};
use hetnet_core::simulate::{replicate, SimMode, SimPlan, Sampler};
use hetnet_core::{build_intensity, isotropic_representation, NetworkModel, PropagationSample};

const MODES: [SimMode; 3] = [SimMode::Original, SimMode::Isotropic, SimMode::Direct];

fn run(model: &NetworkModel, s_max: f64, seed: u64, reps: u64, mode: SimMode, beta_prime: f64) -> Vec<PropagationSample> {
    let plan = SimPlan::new(s_max, 1e-3, seed, reps, mode).unwrap();
    replicate(&Sampler::for_plan(model, &plan, beta_prime).unwrap(), &plan)
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0))
}

#[test]
fn mean_count_identity() {
    let two = two_tier();
    let cases = [
        (unit_model(), 10.0, 2.0),
        (shadowed(5.0, 3.307), 10.0, 3.307),
        (two.clone(), build_intensity(&two).unwrap().inverse(50.0), 3.307),
    ];
    for (k, (model, s_max, bp)) in cases.iter().enumerate() {
        let lam = build_intensity(model).unwrap().marginal(*s_max);
        for mode in MODES {
            let samples = run(model, *s_max, 100 + k as u64, 1000, mode, *bp);
            let counts: Vec<f64> = samples.iter().map(|s| s.len() as f64).collect();
            let (m, _) = mean_var(&counts);
            let se = (lam / 1000.0).sqrt();
            assert!((m - lam).abs() <= 4.0 * se, "case {k} {mode:?}: mean {m} vs Λ = {lam}");
        }
    }
}

#[test]
fn unit_counts_are_poisson() {
    let lam = 10.0 * std::f64::consts::PI;
    for mode in MODES {
        let counts: Vec<f64> = run(&unit_model(), 10.0, 7, 1000, mode, 2.0).iter().map(|s| s.len() as f64).collect();
        let (m, v) = mean_var(&counts);
        assert!((m - lam).abs() <= 4.0 * (lam / 1000.0).sqrt());
        // Var(s²) ≈ (μ + 2μ²)/n for Poisson counts.
        assert!((v - lam).abs() <= 4.0 * ((lam + 2.0 * lam * lam) / 1000.0).sqrt(), "{mode:?}: variance {v}");
    }
}

#[test]
fn tier_shares_follow_intensity_terms() {
    let model = two_tier();
    let im = build_intensity(&model).unwrap();
    let s_max = im.inverse(50.0);
    let p = im.terms()[0].lambda(s_max) / im.marginal(s_max);
    for mode in [SimMode::Original, SimMode::Direct] {
        let samples = run(&model, s_max, 11, 1000, mode, 3.307);
        let n: usize = samples.iter().map(|s| s.len()).sum();
        let first = samples.iter().flat_map(|s| &s.points).filter(|q| q.mark.tier == 0).count();
        let share = first as f64 / n as f64;
        assert!((share - p).abs() <= 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "{mode:?}: {share} vs {p}");
    }
}

#[test]
fn direct_posterior_per_bin() {
    let model = two_tier_shadowed(5.0);
    let im = build_intensity(&model).unwrap();
    let s_max = im.inverse(50.0);
    let samples = run(&model, s_max, 12, 1000, SimMode::Direct, 3.307);
    let edges = log_edges(s_max * 1e-3, s_max, 8, true);
    let z = simultaneous_z(0.01, edges.len() - 1).unwrap();
    for w in edges.windows(2) {
        let pts: Vec<_> = samples.iter().flat_map(|s| &s.points).filter(|q| q.y > w[0] && q.y <= w[1]).collect();
        if pts.len() < 30 {
            continue;
        }
        let t0 = &im.terms()[0];
        let p = (t0.lambda(w[1]) - t0.lambda(w[0])) / (im.marginal(w[1]) - im.marginal(w[0]));
        let n = pts.len() as f64;
        let share = pts.iter().filter(|q| q.mark.tier == 0).count() as f64 / n;
        assert!((share - p).abs() <= z * (p * (1.0 - p) / n).sqrt(), "bin {w:?}: {share} vs {p}");
    }
}

#[test]
fn original_and_direct_agree() {
    let model = shadowed(5.0, 3.307);
    let im = build_intensity(&model).unwrap();
    let s_max = im.inverse(50.0);
    let a = run(&model, s_max, 31, 1000, SimMode::Original, 3.307);
    let b = run(&model, s_max, 32, 1000, SimMode::Direct, 3.307);
    let r = ks_two_sample_time_changed(&a, &b, &im);
    assert!(r.passes(0.01), "{r:?}");
    assert!(a[0].meta.missed_mass <= 1e-3);
}

#[test]
fn isotropic_sampler_fits_original_intensity() {
    let model = two_tier();
    let im = build_intensity(&model).unwrap();
    let s_max = im.inverse(50.0);
    for (i, bp) in [2.0, 3.307, 4.0].into_iter().enumerate() {
        let samples = run(&model, s_max, 40 + i as u64, 400, SimMode::Isotropic, bp);
        let r = time_change_ks_pooled(&samples, &im);
        assert!(r.passes(0.01), "β' = {bp}: {r:?}");
        let r = binned_chi2(&samples, &im, &log_edges(s_max * 1e-4, s_max, 15, true)).unwrap();
        assert!(r.passes(0.01), "β' = {bp}: {r:?}");
    }
}

#[test]
fn isotropic_marks_follow_weights() {
    let model = two_tier();
    let im = build_intensity(&model).unwrap();
    let s_max = im.inverse(50.0);
    let iso = isotropic_representation(&model, 3.307).unwrap();
    let samples = run(&model, s_max, 50, 1000, SimMode::Isotropic, 3.307);
    let r_max = s_max.powf(1.0 / 3.307);
    let edges: Vec<f64> = (0..=10).map(|i| r_max * i as f64 / 10.0).collect();
    let table = mark_table(&samples, &iso, &edges).unwrap();
    let z = simultaneous_z(0.05, table.len()).unwrap();
    for bin in &table {
        assert!(bin.within(z), "{bin:?}");
    }
}

#[test]
fn ks_calibration_and_power() {
    let model = unit_model();
    let im = build_intensity(&model).unwrap();
    let samples = run(&model, 100.0, 2024, 500, SimMode::Direct, 2.0);
    let p: Vec<f64> = samples.iter().map(|s| time_change_ks(s, &im).p_value.unwrap()).collect();
    let rate = p.iter().filter(|&&x| x <= 0.05).count() as f64 / 500.0;
    assert!((rate - 0.05).abs() <= 0.02, "rejection rate {rate}");
    // p-values are uniform under the null.
    let mut u = p.clone();
    let d = hetnet_core::gof::ks_uniform_statistic(&mut u);
    assert!(hetnet_core::gof::ks_p_value(d, 500.0) > 0.01);

    // A doubled rate leaves Λ(Y)/Λ(s_max) unchanged; the gap test detects it.
    let doubled = build_intensity(&NetworkModel::new_with_free_space(vec![hetnet_core::TierSpec::deterministic(2.0, 1.0, 2.0, 1.0).unwrap()]).unwrap()).unwrap();
    let samples = run(&model, 100.0, 2025, 100, SimMode::Original, 2.0);
    let rejected = samples
        .iter()
        .filter(|s| s.len() >= 200 && !time_rescaling_ks_pooled(std::slice::from_ref(*s), &doubled).passes(0.05))
        .count();
    assert!(rejected >= 99, "{rejected}/100");
}

#[test]
fn chi2_refinement_invariance() {
    let model = two_tier();
    let im = build_intensity(&model).unwrap();
    let s_max = im.inverse(50.0);
    let samples = run(&model, s_max, 60, 200, SimMode::Direct, 3.307);
    let coarse = log_edges(s_max * 1e-3, s_max, 6, true);
    let mut fine = coarse.clone();
    for w in coarse.windows(2) {
        for k in 1..4 {
            fine.push(w[0] + (w[1] - w[0]) * k as f64 / 4.0);
        }
    }
    fine.sort_by(f64::total_cmp);
    let direct = BinTable::from_samples(&samples, &im, &coarse).unwrap();
    let back = BinTable::from_samples(&samples, &im, &fine).unwrap().coarsen(&coarse).unwrap();
    assert_eq!(direct.observed, back.observed);
    let (a, b) = (direct.chi2().unwrap().statistic, back.chi2().unwrap().statistic);
    assert!((a - b).abs() <= 1e-12 * a.max(1.0));
}

#[test]
fn replication_is_order_free() {
    let model = two_tier_shadowed(5.0);
    let plan = SimPlan::new(1e15, 1e-3, 99, 6, SimMode::Original).unwrap();
    let sampler = Sampler::for_plan(&model, &plan, 3.307).unwrap();
    let forward = replicate(&sampler, &plan);
    for i in (0..6).rev() {
        assert_eq!(sampler.sample(&plan, i), forward[i as usize]);
    }
}
