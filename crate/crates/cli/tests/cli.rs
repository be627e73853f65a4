use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(name: &str) -> PathBuf {
    root().join("fixtures/corpus").join(name)
}

fn input(name: &str) -> PathBuf {
    root().join("fixtures/inputs").join(name)
}

fn grpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grpd"))
        .current_dir(root())
        .env_remove("GRPD_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = grpd(args);
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, stdout, _) = run(&full);
    (code, serde_json::from_str(&stdout).expect("valid JSON report"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(root().join("crates/core/tests/golden").join(name)).unwrap()
}

#[test]
fn validate_correspondence() {
    let (code, report) = json(&["corr", "validate", "fixtures/corpus/O2X.json"]);
    assert_eq!(code, 0);
    assert_eq!(report["status"], "pass");
    assert_eq!(report["output"]["proper"], true);
    assert_eq!(report["inputs"][0]["path"], "fixtures/corpus/O2X.json");
    assert_eq!(report["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn invalid_files_exit_one() {
    for f in ["PAIR2_BAD_UNIT.json", "NOT_FREE.json"] {
        let path = root().join("fixtures/invalid").join(f);
        let cmd = if f.starts_with("PAIR2") { "groupoid" } else { "corr" };
        let (code, report) = json(&[cmd, "validate", s(&path)]);
        assert_eq!(code, 1, "{f}");
        assert_eq!(report["status"], "fail");
        assert!(report["checks"][0]["witness"].is_string());
    }
    let (code, out, _) = run(&["selfsim", "cocycle", "fixtures/invalid/Z2_BAD_COCYCLE.json"]);
    assert_eq!(code, 1);
    assert!(out.contains("h1 = a, h2 = a, x = 0"), "{out}");
}

#[test]
fn compose_mismatch_exits_two() {
    let (code, _, err) = run(&["compose", "fixtures/corpus/O2X.json", "fixtures/corpus/Z2SWAP.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("endpoint mismatch"), "{err}");
}

#[test]
fn missing_file_exits_two() {
    let (code, _, err) = run(&["groupoid", "validate", "no/such/file.json"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
}

#[test]
fn compose_writes_a_loadable_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("X2.json");
    let x = corpus("O2X.json");
    let (code, report) = json(&["compose", s(&x), s(&x), "-o", s(&out)]);
    assert_eq!(code, 0);
    assert_eq!(report["output"]["fibre_product"], 4);
    let (code, report) = json(&["corr", "classify", s(&out)]);
    assert_eq!(code, 0);
    assert_eq!(report["output"]["proper"], true);
}

#[test]
fn coherence_chain() {
    let x = corpus("Z2SWAP.json");
    let (code, report) = json(&["coherence", s(&x), s(&x), s(&x), s(&x)]);
    assert_eq!(code, 0);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.iter().any(|n| n.contains("pentagon")), "{names:?}");
}

#[test]
fn presentations_match_golden_files() {
    let (code, out, _) = run(&["conduche", "present", "fixtures/corpus/KG21.json"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("kg21_identity_presentation.txt"));
    let (_, out, _) = run(&["kgraph", "present", "fixtures/corpus/KG21_SWAP.json"]);
    assert_eq!(out, golden("kg21_swap_presentation.txt"));
    let (_, out, _) = run(&["conduche", "present", "fixtures/corpus/O2X_GRAPH.json"]);
    assert_eq!(out, golden("o2x_presentation.txt"));
}

#[test]
fn conduche_counterexample_fails() {
    let (code, out, _) = run(&["conduche", "check", "fixtures/invalid/conduche_counterexample.json"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"), "{out}");
    let (code, _, _) = run(&["kgraph", "check", "fixtures/invalid/hexagon.json"]);
    assert_eq!(code, 1);
}

#[test]
fn bracket_and_algebra() {
    let (code, out, _) = run(&["corr", "bracket", "fixtures/corpus/Z2SWAP.json", "(0,e)", "(0,a)"]);
    assert_eq!((code, out.as_str()), (0, "a\n"));
    let (code, _, _) = run(&["corr", "bracket", "fixtures/corpus/Z2SWAP.json", "(0,e)", "(1,a)"]);
    assert_eq!(code, 1);
    let (code, out, _) = run(&["algebra", "norm", "fixtures/corpus/Z2.json", s(&input("Z2_E_PLUS_A.json"))]);
    assert_eq!(code, 0);
    assert_eq!(out.trim().parse::<f64>().unwrap(), 2.0);
    let (_, report) = json(&["algebra", "table", "fixtures/corpus/PAIR2.json"]);
    assert_eq!(report["output"]["table"][0][1], "(1,2)");
    assert!(report["output"]["table"][0][2].is_null());
}

#[test]
fn module_commands() {
    let x = corpus("O2X.json");
    let (code, report) = json(&["module", "inner", s(&x), s(&input("O2X_XI.json")), s(&input("O2X_ETA.json"))]);
    assert_eq!(code, 0);
    assert!(report["output"]["1_*"].is_array());
    let (code, _, _) = run(&["module", "positivity", s(&x), s(&input("O2X_XI.json"))]);
    assert_eq!(code, 0);
    let (code, out, _) = run(&["module", "mu", s(&x), s(&x), s(&input("O2X_TENSOR.json"))]);
    assert_eq!(code, 0);
    assert!(out.contains("[e2,e1]: 2"), "{out}");
}

#[test]
fn selfsim_commands() {
    let (_, out, _) = run(&["selfsim", "act", "fixtures/corpus/ADD.json", "a", "1101"]);
    assert_eq!(out, "0011\n");
    let (code, _, _) = run(&["selfsim", "faithful", "fixtures/corpus/ADD.json"]);
    assert_eq!(code, 0);
    let (code, _, err) = run(&["selfsim", "act", "fixtures/corpus/ADD.json", "zz", "0"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn suite_on_bundled_corpus_passes() {
    let (code, report) = json(&["suite", "fixtures/corpus"]);
    assert_eq!(code, 0, "{report:#}");
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() > 30);
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut files: Vec<&str> = names.iter().map(|n| n.split(':').next().unwrap()).collect();
    files.dedup();
    let mut sorted = files.clone();
    sorted.sort();
    assert_eq!(files, sorted);
}

#[test]
fn suite_on_empty_corpus_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, report) = json(&["suite", s(dir.path())]);
    assert_eq!(code, 0);
    assert_eq!(report["output"]["files"], 0);
}

#[test]
fn suite_names_a_corrupted_file() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["Z2.json", "O2X.json"] {
        std::fs::copy(corpus(f), dir.path().join(f)).unwrap();
    }
    std::fs::copy(root().join("fixtures/invalid/PAIR2_BAD_UNIT.json"), dir.path().join("PAIR2.json")).unwrap();
    std::fs::write(dir.path().join("garbage.json"), "{ not json").unwrap();
    let (code, out, _) = run(&["suite", s(dir.path())]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL PAIR2.json: groupoid laws"), "{out}");
    assert!(out.contains("FAIL garbage.json: load"), "{out}");
    assert!(!out.contains("FAIL Z2.json"));
}

#[test]
fn json_output_is_reproducible() {
    let a = grpd(&["--json", "suite", "fixtures/corpus"]).stdout;
    let b = grpd(&["--json", "suite", "fixtures/corpus"]).stdout;
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert!(v.get("millis").is_none());
    assert!(v["checks"][0].get("millis").is_none());
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_grpd"))
        .current_dir(root())
        .env("GRPD_SEED", "7")
        .args(["--json", "groupoid", "validate", "fixtures/corpus/Z2.json"])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    let (_, v) = json(&["--seed", "9", "groupoid", "validate", "fixtures/corpus/Z2.json"]);
    assert_eq!(v["seed"], 9);
}

#[test]
fn timing_is_opt_in() {
    let (_, v) = json(&["--timing", "corr", "validate", "fixtures/corpus/O2X.json"]);
    assert!(v["millis"].is_f64());
    assert!(v["checks"][0]["millis"].is_f64());
}
