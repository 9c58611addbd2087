use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatfront")).args(args).output().unwrap()
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

/// stderr must be exactly one JSON object on one line.
fn error_json(out: &Output) -> Value {
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "stderr: {}", err);
    serde_json::from_str(lines[0]).unwrap()
}

const EQUIDISTANT: &str = r#"{"kind": "gallery", "name": "equidistant", "params": {"k": 2}}"#;

#[test]
fn gallery_list() {
    let out = run(&["gallery", "list"]);
    assert!(out.status.success());
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names, ["equidistant", "revolution", "dihedral", "tetrahedral"]);
}

#[test]
fn dihedral_mesh_written() {
    let dir = tempfile::tempdir().unwrap();
    let ply = dir.path().join("d.ply");
    let out = run(&["gallery", "build", "dihedral", "--param", "n=3", "--param", "k=1", "--mesh", ply.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&ply).unwrap();
    assert!(text.starts_with("ply\nformat ascii 1.0\n"));
    assert!(text.contains("property float sing"));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["name"], "dihedral");
}

#[test]
fn dihedral_n1_rejected() {
    let out = run(&["gallery", "build", "dihedral", "--param", "n=1", "--param", "k=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["exit"], 2);
}

#[test]
fn verify_equidistant_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", EQUIDISTANT);
    let out = run(&["verify", "--spec", &spec, "--samples", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], true);
    assert!(!report["records"].as_array().unwrap().is_empty());
}

#[test]
fn verify_equal_gauss_maps_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", r#"{"kind": "legendrian_gauss", "G": "z", "Gstar": "z"}"#);
    let out = run(&["verify", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["exit"], 2);
}

#[test]
fn verify_moebius_secondary_map_fails_with_finding() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", r#"{"kind": "null_small", "G": "z", "g": "2*z + 1"}"#);
    let out = run(&["verify", "--spec", &spec, "--samples", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], false);
    assert!(!report["findings"].as_array().unwrap().is_empty());
}

#[test]
fn sample_rows_and_empty_list() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", EQUIDISTANT);
    let out = run(&["sample", "--spec", &spec, "--point", "1,0"]);
    assert!(out.status.success());
    let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
    let ball = &rows[0]["ball"];
    assert!((ball[0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);

    let empty = run(&["sample", "--spec", &spec]);
    assert!(empty.status.success());
    assert_eq!(String::from_utf8(empty.stdout).unwrap().trim(), "[]");

    let c3 = write_spec(dir.path(), "c3.json", r#"{"kind": "c3_integral_free", "g": "z", "h": "z^3/6"}"#);
    let out = run(&["sample", "--spec", &c3, "--point", "1,0"]);
    let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((rows[0]["F"][2][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn sample_at_branch_point_names_the_point() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", EQUIDISTANT);
    let out = run(&["sample", "--spec", &spec, "--point", "0,0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(error_json(&out).get("point").is_some());
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", EQUIDISTANT);
    let a = run(&["verify", "--spec", &spec, "--samples", "30", "--seed", "7"]);
    let b = run(&["verify", "--spec", &spec, "--samples", "30", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let (p, q) = (dir.path().join("a.ply"), dir.path().join("b.ply"));
    for f in [&p, &q] {
        let out = run(&["mesh", "--spec", &spec, "--grid", "0.5,2,8,16", "--mesh", f.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&p).unwrap(), fs::read(&q).unwrap());
}

#[test]
fn errors_are_single_line_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_spec(dir.path(), "bad.json", "{not json");
    for args in [
        vec!["verify", "--spec", bad.as_str()],
        vec!["verify", "--spec", "/nonexistent/spec.json"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{:?}", args);
        let v = error_json(&out);
        assert!(v["error"].is_string() && v["message"].is_string());
    }
}
