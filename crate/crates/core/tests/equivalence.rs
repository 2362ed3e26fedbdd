mod common;

use common::{log_grid, two_tier, two_tier_shadowed};
use hetnet_core::equivalence::{a_corrected_density, default_beta_prime};
use hetnet_core::gof::{equivalence_verdict, Candidate, Verdict, VerdictOptions};
use hetnet_core::simulate::{SimMode, SimPlan};
use hetnet_core::{build_intensity, isotropic_representation};

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[test]
fn isotropic_intensity_matches_original() {
    for model in [two_tier(), two_tier_shadowed(5.0)] {
        let im = build_intensity(&model).unwrap();
        for beta_prime in [2.0, 3.307, 4.0] {
            let iso = isotropic_representation(&model, beta_prime).unwrap();
            for s in log_grid(1e-3, 1e6, 61) {
                for t in [0.5, 1.0, 1.5, 2.0, f64::INFINITY] {
                    let d = rel(im.lambda(s, t), iso.intensity(s, t).unwrap());
                    assert!(d <= 1e-10, "β'={beta_prime} s={s} t={t}: {d:e}");
                }
            }
        }
    }
}

#[test]
fn isotropic_intensity_by_quadrature() {
    // Integrate φ(r,t) numerically rather than through the radial closed form.
    let model = two_tier();
    let im = build_intensity(&model).unwrap();
    for beta_prime in [2.0, 3.307, 4.0] {
        let iso = isotropic_representation(&model, beta_prime).unwrap();
        for s in [1e-2, 1.0, 1e4] {
            for t in [1.0, 2.0] {
                let q = iso.intensity_by_quadrature(s, t, 1e-12).unwrap();
                assert!(rel(q, im.lambda(s, t)) < 1e-9, "β'={beta_prime} s={s} t={t}");
            }
        }
    }
}

#[test]
fn reference_exponent_is_immaterial() {
    // Representations built with different β' induce the same process.
    let model = two_tier_shadowed(8.0);
    let a = isotropic_representation(&model, 2.5).unwrap();
    let b = isotropic_representation(&model, 6.0).unwrap();
    for s in log_grid(1e-3, 1e6, 31) {
        for t in [1.0, f64::INFINITY] {
            assert!(rel(a.intensity(s, t).unwrap(), b.intensity(s, t).unwrap()) < 1e-12);
        }
    }
}

#[test]
fn mark_weights_sum_to_one() {
    let iso = isotropic_representation(&two_tier(), 3.307).unwrap();
    for r in log_grid(1e-4, 1e2, 41) {
        let w = iso.weights(r).unwrap();
        assert!((w[0] + w[1] - 1.0).abs() <= 2.0 * f64::EPSILON);
    }
    // g₁ < g₂: the first tier's share falls with r.
    let w: Vec<f64> = log_grid(1e-4, 1e2, 41).iter().map(|&r| iso.weights(r).unwrap()[0]).collect();
    assert!(w.windows(2).all(|p| p[1] < p[0]));
}

#[test]
fn corrected_density_crosses_single_tier() {
    let model = two_tier();
    let iso = isotropic_representation(&model, 3.307).unwrap();
    let phi = a_corrected_density(&iso);
    let grid = log_grid(1e-2, 10.0, 200);
    assert!(phi.eval(grid[0]) > 4.0);
    assert!(phi.eval(grid[199]) < 4.0);
    let expect = 3.307 / 3.638 * 1.8 + 3.307 / 3.180 * 2.2;
    assert!(rel(phi.eval(1.0), expect) < 1e-14);
}

#[test]
fn verdict_two_tier_vs_representation() {
    let model = two_tier();
    let iso = isotropic_representation(&model, default_beta_prime(&model)).unwrap();
    let s_max = build_intensity(&model).unwrap().inverse(50.0);
    let plan = SimPlan::new(s_max, 1e-3, 20240611, 200, SimMode::Original).unwrap();
    let opts = VerdictOptions { empirical: true, ..VerdictOptions::default() };
    let r = equivalence_verdict(&model, &Candidate::Isotropic(iso), &plan, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::EquivalentAnalytic);
    assert!(r.max_rel_diff.unwrap() <= 1e-10);
    assert_eq!(r.empirical_consistent, Some(true), "{:?}", r.reports);
}
