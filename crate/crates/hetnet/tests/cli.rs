use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hetnet::io::{read_table, ReportJson, SamplesMeta};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hetnet"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn simulate(dir: &Path, name: &str, cfg: &str, extra: &[&str], threads: &str) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["simulate", "--config", cfg, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let res = bin().args(&args).env("HETNET_THREADS", threads).output().unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    out
}

fn gof(samples: &Path, cfg: &str, method: &str) -> ReportJson {
    let out = ok(&["gof", "--samples", samples.to_str().unwrap(), "--config", cfg, "--method", method]);
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn intensity_grid() {
    let cfg = config("unit.json");
    let out = ok(&["intensity", "--config", cfg.to_str().unwrap(), "--s-max", "16", "--points", "5"]);
    let (header, rows) = read_table(out.stdout.as_slice()).unwrap();
    assert_eq!(header, ["s", "lambda"]);
    // β = 4: Λ(s) = π√s.
    for row in rows {
        assert!((row[1] - std::f64::consts::PI * row[0].sqrt()).abs() <= 1e-15 * row[1].max(1.0));
    }
}

#[test]
fn input_errors_exit_2() {
    let cfg = config("unit.json");
    let cfg = cfg.to_str().unwrap();
    assert_eq!(run(&["intensity", "--config", "/no/such/file.json", "--s-max", "1"]).status.code(), Some(2));
    assert_eq!(run(&["equivalent", "--config", cfg, "--r-max", "1", "--beta-prime", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["equivalent", "--config", cfg, "--r-max", "1", "--beta-prime", "0"]).status.code(), Some(2));
    assert_eq!(run(&["hata", "--height", "30", "--freq", "900"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, std::fs::read_to_string(cfg).unwrap().replace("\"value\":4", "\"value\":2")).unwrap();
    let out = run(&["intensity", "--config", bad.to_str().unwrap(), "--s-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tiers[0].beta"));
}

#[test]
fn infeasible_plan_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("random_exponent.json");
    let out = run(&[
        "simulate", "--config", cfg.to_str().unwrap(), "--mode", "original", "--s-max", "1e6", "--eps", "1e-6",
        "--radius-cap", "10", "--out", dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missed mass"));
}

#[test]
fn oversized_simulation_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("random_exponent.json");
    let out = run(&[
        "simulate", "--config", cfg.to_str().unwrap(), "--mode", "direct", "--s-max", "1e15", "--reps", "64", "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("points expected"));
}

#[test]
fn simulate_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("two_tier_shadowed.json");
    let args = ["--mode", "original", "--s-max", "1e15", "--seed", "17", "--reps", "40"];
    let a = simulate(dir.path(), "a.csv", cfg.to_str().unwrap(), &args, "1");
    let b = simulate(dir.path(), "b.csv", cfg.to_str().unwrap(), &args, "4");
    let c = simulate(dir.path(), "c.csv", cfg.to_str().unwrap(), &args, "0");
    let bytes = std::fs::read(&a).unwrap();
    assert!(bytes.len() > 100);
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, std::fs::read(&c).unwrap());
    let meta: SamplesMeta = serde_json::from_slice(&std::fs::read(hetnet::io::meta_path(&a)).unwrap()).unwrap();
    assert_eq!(meta.replications, 40);
    assert!(meta.missed_mass <= 1e-3 && meta.radius.unwrap() > 0.0);
}

#[test]
fn unit_model_pooled_mean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("unit.json");
    let s = simulate(dir.path(), "u.csv", cfg.to_str().unwrap(), &["--mode", "direct", "--s-max", "100", "--reps", "1000", "--seed", "5"], "0");
    let rows = hetnet::io::read_sample_rows(std::fs::File::open(&s).unwrap()).unwrap();
    let lam = std::f64::consts::PI * 10.0;
    let mean = rows.len() as f64 / 1000.0;
    assert!((mean - lam).abs() <= 4.0 * (lam / 1000.0).sqrt(), "{mean}");
}

#[test]
fn gof_self_consistency_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("two_tier.json");
    let cfg = cfg.to_str().unwrap();
    // Λ(s_max) ≈ 50 for this model.
    let s_max = "3.0e15";
    for mode in ["original", "isotropic", "direct"] {
        let s = simulate(dir.path(), &format!("{mode}.csv"), cfg, &["--mode", mode, "--s-max", s_max, "--reps", "200", "--seed", "8"], "0");
        for method in ["ks", "ks-gaps", "chi2", "marks"] {
            let r = gof(&s, cfg, method);
            assert_eq!(r.verdict, "consistent", "{mode} {method}: {r:?}");
        }
    }
    // Samples of a network with twice the density.
    let doubled = dir.path().join("doubled.json");
    std::fs::write(&doubled, std::fs::read_to_string(cfg).unwrap().replace("1.8", "3.6").replace("2.2", "4.4")).unwrap();
    let s = simulate(dir.path(), "d.csv", doubled.to_str().unwrap(), &["--mode", "direct", "--s-max", s_max, "--reps", "200"], "0");
    assert_eq!(gof(&s, cfg, "chi2").verdict, "rejected");
    assert_eq!(gof(&s, cfg, "ks-gaps").verdict, "rejected");
}

#[test]
fn empty_samples_are_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("unit.json");
    let s = simulate(dir.path(), "e.csv", cfg.to_str().unwrap(), &["--mode", "direct", "--s-max", "1e-12", "--reps", "3"], "0");
    for method in ["ks", "chi2", "marks"] {
        let r = gof(&s, cfg.to_str().unwrap(), method);
        assert_eq!(r.verdict, "inconclusive");
        assert_eq!(r.p_value, None);
    }
}

#[test]
fn equivalent_columns() {
    let cfg = config("two_tier.json");
    let out = ok(&["equivalent", "--config", cfg.to_str().unwrap(), "--beta-prime", "3.307", "--r-max", "10", "--points", "50", "--log-grid"]);
    let (header, rows) = read_table(out.stdout.as_slice()).unwrap();
    assert_eq!(header, ["r", "phi", "phi_corrected", "p_1", "p_2"]);
    for row in &rows {
        assert!((row[3] + row[4] - 1.0).abs() <= 2.0 * f64::EPSILON);
    }
    let out = ok(&["equivalent", "--config", cfg.to_str().unwrap(), "--r-max", "10", "--corrected", "false"]);
    let (header, _) = read_table(out.stdout.as_slice()).unwrap();
    assert_eq!(header, ["r", "phi", "p_1", "p_2"]);
    // Constant exponent: φ is flat.
    let unit = config("unit.json");
    let out = ok(&["equivalent", "--config", unit.to_str().unwrap(), "--beta-prime", "4", "--r-max", "3", "--points", "7"]);
    let (_, rows) = read_table(out.stdout.as_slice()).unwrap();
    assert!(rows.iter().all(|r| r[1] == rows[0][1]));
}

#[test]
fn hata_json() {
    let out = ok(&["hata", "--height", "64"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["beta"].as_f64().unwrap() - 3.307).abs() < 1e-3);
    assert!((v["A"].as_f64().unwrap() / 3.979e13 - 1.0).abs() < 5e-3);
    assert_eq!(v["warnings"].as_array().unwrap().len(), 0);
    let out = ok(&["hata", "--height", "20"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn figure1_files() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["figure1", "--out-dir", dir.path().to_str().unwrap()]);
    for name in ["two_tier_no_shadowing", "two_tier_shadowing", "single_tier_no_shadowing", "single_tier_shadowing"] {
        let f = std::fs::File::open(dir.path().join(format!("figure1_{name}.csv"))).unwrap();
        let (header, rows) = read_table(f).unwrap();
        assert_eq!(rows.len(), 200);
        assert_eq!(header[0], "r");
    }
    let blocked = dir.path().join("file");
    std::fs::write(&blocked, "").unwrap();
    assert_eq!(run(&["figure1", "--out-dir", blocked.join("sub").to_str().unwrap()]).status.code(), Some(2));
}
