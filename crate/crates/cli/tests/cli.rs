use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qmac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmac")).args(args).output().expect("binary runs")
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    full.extend(["--out", &p]);
    let out = qmac(&full);
    let content = fs::read_to_string(&path).unwrap_or_default();
    (out.status.code().unwrap(), content)
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn gap_curve_grid() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) =
        run_to_file(dir.path(), "gap.csv", &["gap-curve", "--p-min", "0", "--p-max", "1", "--steps", "11"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("p,chi1,chi2_prime,gap\n"));
    assert!(!text.contains('\r'));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 11);
    assert!(rows[0][3].abs() < 1e-9);
    assert_eq!(rows[10][0], 1.0);
    assert!((rows[10][1] - 1.0).abs() < 1e-12);
    assert!(rows[5][3] > 0.0);
}

#[test]
fn gap_curve_json_format() {
    let out = qmac(&["gap-curve", "--steps", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["chi1"], 2.0);
}

#[test]
fn regions_report() {
    let out = qmac(&["regions"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["minkowski_subset_of_product"], true);
    assert_eq!(v["strict"], true);
    let regions = v["regions"].as_array().unwrap();
    let names: Vec<&str> = regions.iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["psi_id", "phi1", "minkowski_phi1_psi_id", "phi1_x_psi_id"]);
    let product: Vec<Vec<f64>> = serde_json::from_value(regions[3]["vertices"].clone()).unwrap();
    assert_eq!(product, vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![1.0, 2.0], vec![0.0, 2.0]]);
    let sum: Vec<Vec<f64>> = serde_json::from_value(regions[2]["vertices"].clone()).unwrap();
    assert_eq!(sum, vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 1.0], vec![1.0, 2.0], vec![0.0, 2.0]]);
    assert_eq!(regions[0]["units"], "bits/use");
}

#[test]
fn verify_gamma_and_dense_coding() {
    let out = qmac(&["verify", "--suite", "gamma-bound", "--steps", "50", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let max = v["suites"][0]["details"]["max_bound"].as_f64().unwrap();
    assert!(max < 1.81 && max > 1.7);
    let out = qmac(&["verify", "--suite", "dense-coding", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["suites"][0]["details"]["dense_coding_rate"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn verify_chi_consistency_small() {
    let out = qmac(&["verify", "--suite", "chi-consistency", "--seed", "7", "--restarts", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suites"][0]["details"]["chi1"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_random_suites_small() {
    let args = ["verify", "--suite", "entropy-max", "--suite", "min-output", "--suite", "classical-additivity"];
    let out = qmac(&[&args[..], &["--seed", "3", "--trials", "50"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), 3);
    assert_eq!(v["pass"], true);
}

#[test]
fn classical_demo_matches_sum() {
    let out = qmac(&["classical-demo", "--seed", "4", "--trials", "20"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["hausdorff"].as_f64().unwrap() < 1e-2);
    let sum: Vec<Vec<f64>> = serde_json::from_value(v["regions"][2]["vertices"].clone()).unwrap();
    assert_eq!(sum, vec![vec![0.0, 0.0], vec![1.5, 0.0], vec![1.5, 1.0], vec![0.5, 2.0], vec![0.0, 2.0]]);
}

#[test]
fn gamma_bound_csv() {
    let out = qmac(&["gamma-bound", "--p-min", "0", "--p-max", "1", "--steps", "3"]);
    assert!(out.status.success());
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0], vec![0.0, 1.0]);
    assert_eq!(rows[2], vec![1.0, 3.0]);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["classical-demo", "--seed", "9", "--trials", "10"];
    let (_, a) = run_to_file(dir.path(), "a.json", &args);
    let (_, b) = run_to_file(dir.path(), "b.json", &args);
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["verify", "--suite", "nope", "--seed", "1"][..],
        &["gap-curve", "--steps", "1"],
        &["gap-curve", "--p-max", "1.5"],
        &["gap-curve", "--p-min", "0.8", "--p-max", "0.2"],
        &["verify", "--suite", "dense-coding"],
        &["classical-demo"],
        &["no-such-command"],
    ] {
        let out = qmac(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(qmac(&["--help"]).status.code(), Some(0));
}

#[test]
fn io_errors_exit_two_without_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing").join("gap.csv");
    let out = qmac(&["gap-curve", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!missing.exists());
    let out = qmac(&["regions", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}
