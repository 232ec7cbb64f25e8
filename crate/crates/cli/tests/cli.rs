use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const LAMBDA_POSET: &str = r#"{"elements":["a","b","c"],"relations":[["c","a"],["c","b"]]}"#;

const LAMBDA_SYSTEM: &str = r#"{
  "poset": {"elements":["a","b","c"],"relations":[["c","a"],["c","b"]]},
  "algebras": {"a":[2],"b":[3],"c":[1]},
  "morphisms": [{"from":"c","to":"a","mult":[[2]]},{"from":"c","to":"b","mult":[[3]]}]
}"#;

const SQUARE_SYSTEM: &str = r#"{
  "poset": {"elements":["x","y","z","w"],"relations":[["x","y"],["y","w"],["x","z"],["z","w"]]},
  "algebras": {"x":[1,1],"y":[1,1],"z":[1,1],"w":[1,1]},
  "morphisms": [
    {"from":"x","to":"y","mult":[[1,0],[0,1]]},
    {"from":"y","to":"w","mult":[[1,0],[0,1]]},
    {"from":"x","to":"z","mult":[[1,0],[0,1]]},
    {"from":"z","to":"w","mult":[[MULT]]}
  ]
}"#;

const CHAIN_SYSTEM: &str = r#"{
  "poset": {"elements":["p","q","r","s"],"relations":[["p","q"],["q","r"],["r","s"]]},
  "algebras": {"p":[1],"q":[2],"r":[2,2],"s":[4,4]},
  "morphisms": [
    {"from":"p","to":"q","mult":[[2]]},
    {"from":"q","to":"r","mult":[[1],[1]]},
    {"from":"r","to":"s","mult":[[2,0],[1,1]]}
  ]
}"#;

fn indlim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indlim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn without_timing(mut report: Value) -> Value {
    report.as_object_mut().unwrap().remove("timing");
    report
}

fn check_status(report: &Value, name: &str) -> String {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["check"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["status"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn analyze_lambda_poset() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "lambda.json", LAMBDA_POSET);
    let out = indlim(&["analyze", arg(&file), "--brute-check", "--json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["command"], "analyze");
    assert_eq!(report["inputs_digest"].as_str().unwrap().len(), 64);
    assert_eq!(report["details"]["components"].as_array().unwrap().len(), 2);
    for name in [
        "monotonicity",
        "base_axioms",
        "t1",
        "component_intersection",
        "singleton_criterion",
        "brute_force_oracle",
    ] {
        assert_eq!(check_status(&report, name), "pass");
    }
}

#[test]
fn cyclic_relations_are_invalid_input() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "cycle.json",
        r#"{"elements":["a","b"],"relations":[["a","b"],["b","a"]]}"#,
    );
    let out = indlim(&["analyze", arg(&file)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("antisymmetry"));
}

#[test]
fn malformed_and_missing_files_are_invalid_input() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "junk.json", "{ not json");
    assert_eq!(code(&indlim(&["analyze", arg(&file)])), 2);
    assert_eq!(code(&indlim(&["analyze", "/nonexistent/poset.json"])), 2);
    assert_eq!(code(&indlim(&["nonsense"])), 2);
}

#[test]
fn dot_output_for_analyze() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "lambda.json", LAMBDA_POSET);
    let dot = dir.path().join("lambda.dot");
    let out = indlim(&["analyze", arg(&file), "--dot", arg(&dot)]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph poset {"));
    assert!(text.contains("\"c\" -> \"a\";") && text.contains("\"c\" -> \"b\";"));
    assert!(text.contains("style=wedged"));
}

#[test]
fn reports_are_deterministic_for_a_fixed_seed() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "chain.json", CHAIN_SYSTEM);
    let run = |seed: &str| without_timing(json(&indlim(&["indsys", arg(&file), "--seed", seed, "--json"])));
    assert_eq!(run("7"), run("7"));
    let a = run("7");
    let b = run("8");
    assert_ne!(a["inputs_digest"], b["inputs_digest"]);
    let thm = || without_timing(json(&indlim(&["thm3", "ex1", "--seed", "3", "--json"])));
    assert_eq!(thm(), thm());
}

#[test]
fn family_ex1_is_not_hausdorff() {
    let out = indlim(&["family", "ex1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("not Hausdorff: witness pair (-inf,+inf)"));
    let report = json(&indlim(&["family", "ex1", "--json"]));
    let pairs = report["details"]["unseparated_pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0], serde_json::json!(["-inf", "+inf"]));
}

#[test]
fn family_ex3_is_discrete() {
    let out = indlim(&["family", "ex3", "--window", "-3,3,-2,0"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("discrete: every index isolated"));
}

#[test]
fn family_ex2_neighborhood_of_origin_row() {
    let out = indlim(&[
        "family",
        "ex2",
        "--param",
        "1/1",
        "--point",
        "(0,-1)",
        "--samples",
        "0",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert!(report["notes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|n| n == "U_(0,-1) = (-1,1)"));
    assert_eq!(check_status(&report, "open_interval_shape"), "pass");
}

#[test]
fn family_rejects_bad_parameters() {
    assert_eq!(code(&indlim(&["family", "ex2", "--param", "0"])), 2);
    assert_eq!(code(&indlim(&["family", "ex1", "--param", "2"])), 2);
    assert_eq!(code(&indlim(&["family", "ex4"])), 2);
    assert_eq!(code(&indlim(&["family", "ex3", "--point", "1,1"])), 2);
    assert_eq!(code(&indlim(&["family", "ex1", "--window", "1,0,0,1"])), 2);
}

#[test]
fn family_window_dot_has_positions() {
    let dir = TempDir::new().unwrap();
    let dot = dir.path().join("ex1.dot");
    assert_eq!(code(&indlim(&["family", "ex1", "--dot", arg(&dot)])), 0);
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph window {"));
    assert!(text.contains("pos=\"2,0!\""));
}

#[test]
fn topology_accepts_family_windows() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "w.json", r#"{"family":"ex3","window":"0,2,-2,0"}"#);
    let out = indlim(&["topology", arg(&file), "--json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(check_status(&report, "all_isolated"), "pass");
    assert!(report["notes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|n| n == "discrete: every index isolated"));
}

#[test]
fn indsys_lambda_passes_with_expected_apexes() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "lambda.json", LAMBDA_SYSTEM);
    let out = indlim(&["indsys", arg(&file), "--json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let apexes: Vec<Value> = report["details"]["colimits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["apex"].clone())
        .collect();
    assert_eq!(apexes, vec![serde_json::json!([2]), serde_json::json!([3])]);
    assert_eq!(report["details"]["global_products"]["m_f"], serde_json::json!([2, 3]));
    assert_eq!(
        report["details"]["global_products"]["m_hat_f"],
        serde_json::json!([2, 3])
    );
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["status"] == "pass"));
}

#[test]
fn indsys_broken_square_fails_with_triple() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.json", &SQUARE_SYSTEM.replace("[MULT]", "[1,0],[0,1]"));
    assert_eq!(code(&indlim(&["indsys", arg(&good)])), 0);
    let bad = write(&dir, "bad.json", &SQUARE_SYSTEM.replace("[MULT]", "[0,1],[1,0]"));
    let out = indlim(&["indsys", arg(&bad), "--json"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    let coherence = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["check"] == "coherence")
        .unwrap();
    assert_eq!(coherence["status"], "fail");
    let w = &coherence["witnesses"][0];
    assert!(w.get("a").is_some() && w.get("b").is_some() && w.get("c").is_some());
}

#[test]
fn indsys_non_unital_literal_is_invalid() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "bad.json", &LAMBDA_SYSTEM.replace("[[2]]", "[[1]]"));
    assert_eq!(code(&indlim(&["indsys", arg(&file)])), 2);
}

#[test]
fn indsys_stage_count_flag() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "chain.json", CHAIN_SYSTEM);
    let report = json(&indlim(&["indsys", arg(&file), "--stages", "4", "--json"]));
    let profiles = report["details"]["norm_profiles"].as_array().unwrap();
    assert_eq!(profiles[0]["rows"].as_array().unwrap().len(), 4);
    assert_eq!(check_status(&report, "norm_profile"), "pass");
}

#[test]
fn thm3_examples() {
    let out = indlim(&["thm3", "ex1", "--index", "+inf", "--depth", "6"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("center contains a non-trivial projection at every checked stage"));
    assert_eq!(code(&indlim(&["thm3", "ex1", "--index", "5"])), 2);
    assert_eq!(code(&indlim(&["thm3", "ex3", "--index", "0"])), 2);
    assert_eq!(code(&indlim(&["thm3", "ex1", "--depth", "2"])), 2);
}

#[test]
fn thm3_minus_infinity_also_passes() {
    let report = json(&indlim(&["thm3", "ex1", "--index", "-inf", "--json"]));
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["status"] == "pass"));
}
