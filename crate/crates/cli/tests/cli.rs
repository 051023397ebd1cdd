use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_narrowlie")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn verify_n2_truncation() {
    let out = run(&["verify", "catalog:n2(len=12)"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "jacobi: ok, carnot: ok (length 12)");
}

#[test]
fn m0_cohomology_table() {
    let out = run(&["--json", "cohomology", "catalog:m0(len=9)", "--gradings", "2..9"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let dims: Vec<u64> = v["report"]["slices"].as_array().unwrap().iter().map(|s| s["h2"].as_u64().unwrap()).collect();
    assert_eq!(dims, [0, 1, 0, 1, 0, 1, 0, 1]);
    assert_eq!(v["report"]["stable_up_to"], 9);
}

#[test]
fn iso_verdicts_and_exit_codes() {
    let out = run(&["iso", "catalog:n1plus(len=6)", "catalog:n1minus(len=6)", "--field", "Qi"]);
    assert_eq!(code(&out), 0);
    let out = run(&["--json", "iso", "catalog:n1plus(len=6)", "catalog:n1minus(len=6)"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["report"]["verdict"], "non-iso");
    let out = run(&["iso", "catalog:n1plus(len=6)", "catalog:n1minus(len=6)", "--sqrt=-1"]);
    assert_eq!(code(&out), 0);
    let out = run(&["iso", "catalog:n1minus(len=5)", "catalog:n1(len=5)", "--sqrt", "3", "--max-nodes", "0"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn usage_and_data_errors_exit_2() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["verify", "catalog:nope(len=3)"])), 2);
    assert_eq!(code(&run(&["verify", "catalog:m0(len=3, S=[3])"])), 2);
    assert_eq!(code(&run(&["verify", "/nonexistent/algebra.json"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
}

#[test]
fn field_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let out = run(&["--json", "catalog", "m0(len=4)"]);
    fs::write(&path, json(&out)["report"].to_string()).unwrap();
    assert_eq!(code(&run(&["verify", path.to_str().unwrap(), "--field", "Qi"])), 2);
    assert_eq!(code(&run(&["verify", path.to_str().unwrap(), "--field", "Q"])), 0);
}

#[test]
fn emitted_algebras_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for spec in ["n2(len=7)", "m0S(len=6, S=[3,5])", "n1plus(len=5)", "m1(len=7)"] {
        let out = run(&["--json", "catalog", spec]);
        assert_eq!(code(&out), 0, "{spec}");
        let emitted = json(&out)["report"].clone();
        let path = dir.path().join("a.json");
        fs::write(&path, emitted.to_string()).unwrap();
        let from_file = run(&["--json", "invariants", path.to_str().unwrap()]);
        let from_spec = run(&["--json", "invariants", &format!("catalog:{spec}")]);
        assert_eq!(json(&from_file)["report"], json(&from_spec)["report"], "{spec}");
        let gr_path = dir.path().join("b.json");
        let out = run(&["gr", path.to_str().unwrap(), "--out", gr_path.to_str().unwrap()]);
        assert!(matches!(code(&out), 0 | 1), "{spec}");
        let mut reloaded: Value = serde_json::from_str(&fs::read_to_string(&gr_path).unwrap()).unwrap();
        let out = run(&["--json", "gr", gr_path.to_str().unwrap()]);
        let mut again = json(&out)["report"]["gr"].clone();
        reloaded.as_object_mut().unwrap().remove("name");
        again.as_object_mut().unwrap().remove("name");
        assert_eq!(again, reloaded, "{spec}: gr is not idempotent on reload");
        let out = run(&["verify", gr_path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{spec}: {}", stdout(&out));
    }
}

#[test]
fn extend_by_cocycle_file() {
    let dir = tempfile::tempdir().unwrap();
    let cocycle = dir.path().join("c.json");
    // e2 ^ e3 on m0(2)
    fs::write(&cocycle, r#"{"grading":3,"terms":[{"i":1,"a":1,"j":2,"b":0,"coef":"1"}]}"#).unwrap();
    let ext = dir.path().join("ext.json");
    let out = run(&[
        "--json",
        "extend",
        "--algebra",
        "catalog:m0(len=2)",
        "--cocycle",
        cocycle.to_str().unwrap(),
        "--out",
        ext.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(json(&out)["report"]["carnot_extension"], true);
    let out = run(&["iso", ext.to_str().unwrap(), "catalog:m0(len=3)"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn naturally_graded_verdicts() {
    assert_eq!(code(&run(&["gr", "catalog:m0(len=5)"])), 0);
    assert_eq!(code(&run(&["gr", "catalog:wplus(len=5)"])), 1);
}

#[test]
fn invariants_report() {
    let out = run(&["--json", "invariants", "catalog:n1plus(len=6)"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["report"]["dims"], serde_json::json!([2, 1, 2, 1, 2, 1]));
    assert_eq!(v["report"]["real_form_discriminant"]["sign"], -1);
    assert!(v["version"].is_string());
}

#[test]
fn enumerate_writes_tree_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("tree.json");
    let dot = dir.path().join("tree.dot");
    let out = run(&[
        "enumerate",
        "--max-length",
        "4",
        "--out",
        tree.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("length 4: 4 classes"));
    let v: Value = serde_json::from_str(&fs::read_to_string(&tree).unwrap()).unwrap();
    assert_eq!(v["levels"][1]["classes"], 2);
    assert_eq!(v["config"]["height"], 3);
    let dot = fs::read_to_string(&dot).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("style=dashed") || dot.contains("style=dotted"));
}

#[test]
fn reports_are_deterministic() {
    let a = run(&["--json", "enumerate", "--max-length", "3"]);
    let b = run(&["--json", "enumerate", "--max-length", "3"]);
    assert_eq!(a.stdout, b.stdout);
}
