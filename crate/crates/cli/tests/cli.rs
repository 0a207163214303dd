use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn shipped(name: &str) -> String {
    root().join(format!("scenarios/{name}.scenario")).display().to_string()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/fixtures/{name}.scenario")).display().to_string()
}

fn bq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bq")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_all_on_trivial_passes() {
    let out = bq(&["verify-all", "--scenario", &shipped("trivial"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["command"], "verify-all");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn sl2_has_one_packet_of_size_two() {
    let out = bq(&["packets", "--scenario", &shipped("sl2_quadratic"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let comps = v["sections"]["packets"]["components"].as_array().unwrap();
    let big: Vec<&Value> = comps.iter().flat_map(|c| c["nonsingleton_packets"].as_array().unwrap()).collect();
    assert_eq!(big.len(), 1);
    assert_eq!(big[0].as_array().unwrap().len(), 2);
}

#[test]
fn mismatched_diagram_names_components_row() {
    let out = bq(&["diagram", "--scenario", &fixture("mismatched")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("packets: diagram row components"), "{err}");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.contains("FAIL") && l.contains("components")));
}

#[test]
fn seed_must_be_none() {
    let sc = shipped("trivial");
    let out = bq(&["enumerate", "--scenario", &sc, "--seed", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    assert_eq!(bq(&["enumerate", "--scenario", &sc, "--seed", "none"]).status.code(), Some(0));
}

#[test]
fn zero_denominator_rejected() {
    let out = bq(&["enumerate", "--scenario", &shipped("trivial"), "--sample-denominator", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_byte_identical() {
    for name in ["swap_pairs", "klein_twisted"] {
        for fmt in ["json", "text"] {
            let a = bq(&["verify-all", "--scenario", &shipped(name), "--format", fmt]);
            let b = bq(&["verify-all", "--scenario", &shipped(name), "--format", fmt]);
            assert_eq!(a.status.code(), Some(0));
            assert_eq!(a.stdout, b.stdout, "{name} {fmt}");
        }
    }
}

#[test]
fn out_writes_both_forms() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("reports");
    let out = bq(&["kl", "--scenario", &shipped("halved"), "--format", "json", "--out", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let j = std::fs::read(d.join("halved.kl.json")).unwrap();
    assert_eq!(j, out.stdout);
    let t = std::fs::read_to_string(d.join("halved.kl.txt")).unwrap();
    assert!(t.contains("PASS"));
    let names: Vec<_> = std::fs::read_dir(&d).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2);
}

#[test]
fn malformed_cocycle_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(fixture("mismatched")).unwrap();
    let cases = [
        (r#"[["1/3", "0"], ["0", "0"]]"#, "kappa"),
        (r#"[["0", "x"], ["0", "0"]]"#, "inertial.stab.kappa"),
        (r#"[["0"], ["0", "0"]]"#, "kappa"),
    ];
    for (i, (kappa, needle)) in cases.iter().enumerate() {
        let body = src.replace(r#"[["0", "1/2"], ["0", "0"]]"#, kappa);
        assert_ne!(body, src);
        let p = dir.path().join(format!("bad{i}.scenario"));
        std::fs::write(&p, body).unwrap();
        let out = bq(&["enumerate", "--scenario", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{kappa}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{kappa}: {err}");
    }
}

#[test]
fn unknown_command_rejected() {
    let out = bq(&["frobnicate", "--scenario", &shipped("trivial")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown command"));
}

#[test]
fn missing_scenario_file() {
    let out = bq(&["enumerate", "--scenario", "/nonexistent/x.scenario"]);
    assert_eq!(out.status.code(), Some(2));
}
