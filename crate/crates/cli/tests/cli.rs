use std::path::Path;
use std::process::{Command, Output};

use rand::Rng;
use serde_json::Value;
use taildep::rng::{domain_tag, Streams};
use taildep::{TestReport, Verdict};

fn taildep(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taildep"))
        .current_dir(dir)
        .env_remove("TAILDEP_SEED")
        .args(args)
        .output()
        .expect("spawn taildep")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = taildep(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn random_walk(path: &Path, len: usize, seed: u64) {
    let mut rng = Streams::new(seed).substream(domain_tag("cli.prices"), 0);
    let mut s = String::from("date,close\n");
    let mut p = 100.0f64;
    for i in 0..len {
        s.push_str(&format!("d{i},{p}\n"));
        p *= (0.01 * (rng.random::<f64>() - 0.5)).exp();
    }
    std::fs::write(path, s).unwrap();
}

fn rows(csv: &str) -> usize {
    csv.lines().count() - 1
}

#[test]
fn simulate_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["simulate", "--example", "2", "--n", "10", "--seed", "1"]);
    assert!(out.starts_with("x,y\n"));
    assert_eq!(rows(&out), 10);
    for line in out.lines().skip(1) {
        for v in line.split(',') {
            assert!(v.parse::<f64>().unwrap() >= 0.0);
        }
    }
}

#[test]
fn seed_flag_overrides_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, args: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_taildep"));
        cmd.env_remove("TAILDEP_SEED");
        if let Some(e) = env {
            cmd.env("TAILDEP_SEED", e);
        }
        let out = cmd.current_dir(dir.path()).args(args).output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let base = ["simulate", "--n", "5"];
    let env5 = run(Some("5"), &base);
    let flag5 = run(None, &[&base[..], &["--seed", "5"]].concat());
    let env9_flag5 = run(Some("9"), &[&base[..], &["--seed", "5"]].concat());
    let env9 = run(Some("9"), &base);
    assert_eq!(env5, flag5);
    assert_eq!(env9_flag5, flag5);
    assert_ne!(env9, flag5);
}

#[test]
fn prep_reduces_1761_prices_to_880_returns() {
    let dir = tempfile::tempdir().unwrap();
    random_walk(&dir.path().join("p.csv"), 1761, 3);
    ok(dir.path(), &["prep", "--input", "p.csv", "--stride", "2", "--output", "r2.csv"]);
    ok(dir.path(), &["prep", "--input", "p.csv", "--stride", "1", "--output", "r1.csv"]);
    let r2 = std::fs::read_to_string(dir.path().join("r2.csv")).unwrap();
    let r1 = std::fs::read_to_string(dir.path().join("r1.csv")).unwrap();
    assert_eq!(rows(&r2), 880);
    assert_eq!(rows(&r1), 1760);
    assert!(r2.starts_with("index,return,abs_return\n"));

    let acf = std::fs::read_to_string(dir.path().join("r2.acf.csv")).unwrap();
    assert_eq!(rows(&acf), 21);
    assert!(acf.lines().nth(1).unwrap().starts_with("0,1,1"));
}

#[test]
fn prep_flags_constant_prices_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = String::from("close\n");
    for _ in 0..50 {
        s.push_str("5\n");
    }
    std::fs::write(dir.path().join("c.csv"), s).unwrap();
    let out = taildep(dir.path(), &["prep", "--input", "c.csv", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(v["returns"].as_array().unwrap().iter().all(|r| r.as_f64() == Some(0.0)));
    assert!(v["acf_returns"].is_null());
    assert!(v["acf_errors"]["acf_returns"].is_string());
    assert!(!out.stderr.is_empty());
}

#[test]
fn prep_rejects_nonpositive_prices() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "close\n1\n2\n0\n3\n").unwrap();
    let out = taildep(dir.path(), &["prep", "--input", "bad.csv"]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_csv_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), "x,y\n1,2\n3,oops\n").unwrap();
    let out = taildep(dir.path(), &["support", "--input", "m.csv"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("oops"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn negative_values_need_abs() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = String::from("a,b\n");
    for i in 1..=40 {
        s.push_str(&format!("{},{}\n", -(i as f64), i as f64 * 0.5));
    }
    std::fs::write(dir.path().join("n.csv"), s).unwrap();
    assert!(!taildep(dir.path(), &["support", "--input", "n.csv", "--no-abs"]).status.success());
    ok(dir.path(), &["support", "--input", "n.csv", "--k", "10"]);
    ok(dir.path(), &["support", "--input", "n.csv", "--no-abs", "--abs", "--cols", "b,a", "--k", "10"]);
}

#[test]
fn support_on_ray_data_collapses() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = String::from("x,y\n");
    for i in 1..=500 {
        let r = 1.0 / (i as f64 / 501.0).sqrt();
        s.push_str(&format!("{},{}\n", 0.3 * r, 0.7 * r));
    }
    std::fs::write(dir.path().join("ray.csv"), s).unwrap();
    let v: Value = serde_json::from_str(&ok(dir.path(), &["support", "--input", "ray.csv"])).unwrap();
    assert_eq!(v["k"], 50);
    assert_eq!(v["k_source"], "heuristic");
    let a = v["estimate"]["a_hat"].as_f64().unwrap();
    let b = v["estimate"]["b_hat"].as_f64().unwrap();
    assert!(b - a < 1e-3, "[{a}, {b}]");
    assert!((a - 0.3).abs() < 1e-3);
}

#[test]
fn smoke_scale_test_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["simulate", "--n", "2000", "--seed", "2", "--output", "s.csv"]);
    let out = ok(dir.path(), &["test", "--input", "s.csv", "--B", "2", "--seed", "2"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["cone"]["source"], "estimated");
    assert_eq!(v["config"]["B"], 2);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for (r, id) in reports.iter().zip(["H1", "H2", "H3"]) {
        assert_eq!(r["test_id"], id);
        assert_eq!(r["per_resample"].as_array().unwrap().len(), 2);
        let parsed: TestReport = serde_json::from_value(r.clone()).unwrap();
        assert_eq!(serde_json::to_value(&parsed).unwrap(), *r);
    }
}

#[test]
fn reject_verdict_still_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["simulate", "--n", "5000", "--seed", "4", "--output", "s.csv"]);
    // a narrow cone away from the data is rejected
    let out = ok(
        dir.path(),
        &["test", "--input", "s.csv", "--which", "strong", "--cone", "0.9,0.95", "--B", "50"],
    );
    let v: Value = serde_json::from_str(&out).unwrap();
    let r: TestReport = serde_json::from_value(v["reports"][0].clone()).unwrap();
    assert_eq!(r.verdict, Verdict::Reject);
    assert_eq!(v["cone"]["source"], "given");
}

#[test]
fn test_csv_format_has_one_row_per_report() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["simulate", "--n", "3000", "--output", "s.csv"]);
    let out = ok(
        dir.path(),
        &["test", "--input", "s.csv", "--cone", "0.25,0.75", "--B", "20", "--format", "csv"],
    );
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "test_id,verdict,statistic,threshold_low,threshold_high,cone_a,cone_b");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("H3,"));
}

#[test]
fn diamond_k1_lies_on_unit_diamond() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("q.csv"), "u,v\n1,-2\n-3,4\n0.5,0.1\n").unwrap();
    let out = ok(dir.path(), &["diamond", "--input", "q.csv", "--k", "1", "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let p = &v["points"][0];
    let (x, y) = (p["x"].as_f64().unwrap(), p["y"].as_f64().unwrap());
    assert!((x.abs() + y.abs() - 1.0).abs() < 1e-15);
    assert!(x < 0.0 && y > 0.0);
    assert_eq!(v["histogram"].as_array().unwrap().len(), 20);
}

#[test]
fn diamond_example1_mass_on_cone() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["simulate", "--n", "30000", "--seed", "5", "--output", "e.csv"]);
    ok(dir.path(), &["diamond", "--input", "e.csv", "--k", "100", "--output", "d.csv"]);
    let pts = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert_eq!(rows(&pts), 100);
    let mut inside = 0.0;
    let hist = std::fs::read_to_string(dir.path().join("d.hist.csv")).unwrap();
    for line in hist.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        if f[0] >= 0.25 - 1e-12 && f[1] <= 0.75 + 1e-12 {
            inside += f[3];
        }
    }
    assert!(inside >= 0.9, "mass {inside}");
    for line in pts.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!(f[0] >= 0.0 && f[1] >= 0.0);
    }
}

#[test]
fn missing_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = taildep(dir.path(), &["support"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--input"));
}
