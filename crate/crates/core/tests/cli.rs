use std::process::Command;

use octanormal::cli::*;

fn run_args(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("octanormal").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn jones_of_the_unknot() {
    let (code, out, _) = run_args(&["jones", "--n", "1", "unknot"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "q + q^-1\n");
}

#[test]
fn triangulate_lists_two_free_faces() {
    let (code, out, _) = run_args(&["triangulate", "trefoil"]);
    assert_eq!(code, EXIT_OK);
    let free = out.lines().find(|l| l.starts_with("#free")).unwrap();
    assert_eq!(free.split_whitespace().count(), 3);
}

#[test]
fn json_output_parses() {
    let (code, out, _) = run_args(&["--format", "json", "triangulate", "trefoil"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tetrahedra"], 28);
    assert_eq!(v["free_faces"].as_array().unwrap().len(), 2);
    let (_, out, _) = run_args(&["--format", "json", "verify", "trefoil"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in ["k_vector", "h", "tau", "slope", "verdict", "surface_kinds"] {
        assert!(v[0].get(key).is_some(), "{key}");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [&["qmatrix", "trefoil"][..], &["--n", "2", "slopes", "theta_3_m3_5"], &["kh", "trefoil"]] {
        assert_eq!(run_args(args), run_args(args));
    }
}

#[test]
fn verify_reports_verdict_failures() {
    let (code, out, _) = run_args(&["verify", "--n", "2", "trefoil"]);
    assert_eq!(code, EXIT_VERDICT);
    assert!(out.starts_with("n=2 states=3"));
}

#[test]
fn enumerate_prints_one_vector_per_line() {
    let (code, out, _) = run_args(&["enumerate", "--bound", "1", "trefoil"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().all(|l| l.split_whitespace().count() == 84));
}

#[test]
fn usage_and_validation_errors() {
    assert_eq!(run_args(&["verify", "--n", "0", "trefoil"]).0, EXIT_USAGE);
    assert_eq!(run_args(&["frobnicate", "trefoil"]).0, EXIT_USAGE);
    assert_eq!(run_args(&["--convention", "odd", "jones", "trefoil"]).0, EXIT_USAGE);
    assert_eq!(run_args(&["jones", "no_such_fixture"]).0, EXIT_VALIDATION);
    assert_eq!(run_args(&["verify", "unknot"]).0, EXIT_VALIDATION);
}

#[test]
fn resource_guard() {
    assert_eq!(run_args(&["kh", "square_diagonal_20"]).0, EXIT_RESOURCE);
    assert_eq!(run_args(&["--limit", "10", "--n", "2", "verify", "theta_3_m3_5"]).0, EXIT_RESOURCE);
}

#[test]
fn saddle_sign_flag_accepts_minus() {
    let (code, out, _) = run_args(&["--saddle-sign", "-", "slopes", "trefoil"]);
    assert_eq!(code, EXIT_OK);
    assert_ne!(out, run_args(&["slopes", "trefoil"]).1);
}

#[test]
fn reads_graph_files() {
    let dir = std::env::temp_dir().join(format!("octanormal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.json");
    std::fs::write(&path, octanormal::fixtures::TREFOIL.json).unwrap();
    let (code, out, _) = run_args(&["jones", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, run_args(&["jones", "trefoil"]).1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_octanormal");
    let ok = Command::new(bin).args(["jones", "unknot"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "q + q^-1\n");
    let bad = Command::new(bin).args(["jones", "missing"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_VALIDATION));
}
