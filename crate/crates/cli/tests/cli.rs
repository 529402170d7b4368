use std::path::PathBuf;
use std::process::{Command, Output};

use nrange_cli::{parse_document, run_with};
use nrange_core::linalg::c;
use nrange_core::verify::fixtures;
use nrange_core::BlockMatrix;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn nrange(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrange")).args(args).output().expect("binary runs")
}

/// In-process run; returns (exit code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["nrange"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("valid JSON output")
}

fn same(a: &BlockMatrix, b: &BlockMatrix) -> bool {
    a.alpha() == b.alpha()
        && a.beta() == b.beta()
        && a.c_block().max_abs_diff(b.c_block()) <= 1e-15
        && a.d_block().max_abs_diff(b.d_block()) <= 1e-15
}

#[test]
fn fixture_files_match_the_built_in_matrices() {
    let o = c(0.0, 0.0);
    let [first, second] = fixtures::off_center_parameters();
    let cases = [
        ("example33.json", fixtures::commuting_pair(o, o)),
        ("example33_shifted.json", fixtures::commuting_pair(c(1.0, 2.0), c(-1.0, -2.0))),
        ("example36.json", fixtures::nilpotent_pair(o, o)),
        ("example36_shifted.json", fixtures::nilpotent_pair(c(1.0, 1.0), c(-1.0, -1.0))),
        ("yeh.json", fixtures::off_center_pair(first)),
        ("yeh_b.json", fixtures::off_center_pair(second)),
        ("cor33.json", fixtures::perpendicular_segments()),
    ];
    for (name, expect) in cases {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        assert!(same(&parse_document(&text).unwrap(), &expect), "{name}");
    }
}

#[test]
fn verify_commuting_pair_passes() {
    let out = nrange(&["verify", fixture("example33.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(v["classification"], "TheoremTri");
    assert_eq!(v["passed"], true);
    assert!(v["max_support_deviation"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn verify_every_fixture() {
    for name in [
        "example33.json",
        "example33_shifted.json",
        "example36.json",
        "example36_shifted.json",
        "yeh.json",
        "yeh_b.json",
        "cor33.json",
    ] {
        let (code, out, err) = run(&["verify", fixture(name).to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {err}\n{out}");
    }
}

#[test]
fn predict_off_center_pair_detects_nothing() {
    let (code, out, _) = run(&["predict", fixture("yeh.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["classification"], "NoneDetected");
    assert!(v["ellipses"].as_array().unwrap().is_empty());
}

#[test]
fn predict_perpendicular_segments() {
    let (code, out, _) = run(&["predict", fixture("cor33.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["nestedness"], "NonNested");
    assert_eq!(v["m"], 2);
    let e = v["ellipses"].as_array().unwrap();
    assert_eq!(e.len(), 2);
    for x in e {
        assert!(x["semi_minor"].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn boundary_rows_plus_anchors() {
    let (code, out, _) = run(&["boundary", fixture("example36.json").to_str().unwrap(), "--samples", "8"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "theta,support,re,im");
    assert_eq!(lines.len(), 1 + 8 + 2);
    assert!(lines[9].starts_with(",,") && lines[10].starts_with(",,"));
}

#[test]
fn boundary_csv_is_byte_identical_across_runs() {
    let path = fixture("example33_shifted.json");
    let a = nrange(&["boundary", path.to_str().unwrap()]);
    let b = nrange(&["boundary", path.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 1 + 720 + 2);
}

#[test]
fn boundary_json_format() {
    let (code, out, _) = run(&["boundary", fixture("cor33.json").to_str().unwrap(), "--samples", "16", "--format", "json"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["samples"].as_array().unwrap().len(), 16);
    assert_eq!(v["anchors"].as_array().unwrap().len(), 2);
}

#[test]
fn analyze_reports_witnesses() {
    let (code, out, _) = run(&["analyze", fixture("example36.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["classification"], "NilpotentInvariant");
    assert_eq!(v["n"], 4);
    assert_eq!(v["k"], 2);
    assert!(v["witnesses"]["subspace"].is_array());
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.svg");
    let (code, out, err) = run(&[
        "render",
        fixture("example33_shifted.json").to_str().unwrap(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.contains("<svg") && svg.contains("version=\"1.1\""));
    assert_eq!(svg.matches("stroke-dasharray").count(), 2);
}

#[test]
fn mismatched_blocks_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"alpha":[0,0],"beta":[0,0],
            "C":[[[1,0],[0,0]],[[0,0],[1,0]]],
            "D":[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]}"#,
    )
    .unwrap();
    let (code, out, err) = run(&["predict", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(out.is_empty());
    assert!(err.contains("invalid document at D"), "{err}");
}

#[test]
fn missing_file_exits_three() {
    let (code, _, err) = run(&["analyze", "/nonexistent/matrix.json"]);
    assert_eq!(code, 3);
    assert!(err.contains("/nonexistent/matrix.json"));
}

#[test]
fn usage_errors_exit_two() {
    let file = fixture("example33.json");
    let file = file.to_str().unwrap();
    for args in [
        vec![],
        vec!["frobnicate"],
        vec!["boundary"],
        vec!["boundary", file, "--samples", "3"],
        vec!["boundary", file, "--samples", "many"],
        vec!["verify", file, "--tol", "-1"],
        vec!["predict", file, "--format", "svg"],
        vec!["render", file, "--format", "csv"],
    ] {
        let (code, out, err) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, err) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("selftest"));
    assert!(err.is_empty());
}

#[test]
fn tight_tolerance_fails_verification() {
    // Sub-roundoff tolerance cannot be met by any eigensolver.
    let (code, out, _) = run(&["verify", fixture("example33_shifted.json").to_str().unwrap(), "--tol", "1e-300"]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["passed"], false);
}
