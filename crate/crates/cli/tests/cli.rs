use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jensen3"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_mirrored_mt1_reports_the_chain() {
    let out = run(&["check", scenario("mt1_mirrored.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["verdict"], "holds");
    let chain = &report["chain"];
    let values: Vec<f64> = ["gap_left", "mid_left", "mid_right", "gap_right"].iter().map(|k| chain[k].as_f64().unwrap()).collect();
    assert_eq!(values, [-0.25, 0.0, 0.0, 0.25]);
}

#[test]
fn check_straddle_exits_two() {
    let out = run(&["check", scenario("mt4_literal_straddle.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let margin = json(&out)["margin"].as_f64().unwrap();
    assert!((margin + 0.0603).abs() < 1e-4);
}

#[test]
fn check_resolves_tables_next_to_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().current_dir(dir.path()).args(["check", scenario("affine_tabulated.json").to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((json(&out)["margin"].as_f64().unwrap() - 1.2).abs() < 1e-12);
}

#[test]
fn malformed_files_exit_one_with_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"schema_version\": 1,\n  \"theorem\": \"mt1\",\n  oops\n}\n").unwrap();
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let wrong_shape = dir.path().join("shape.json");
    std::fs::write(&wrong_shape, r#"{"schema_version":1,"theorem":"it2","function":"exp","scenario":{"inner":[0,1]}}"#).unwrap();
    let out = run(&["check", wrong_shape.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scenario"));
}

#[test]
fn unmet_hypotheses_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("mt1_mirrored.json")).unwrap().replace("\"weights\": [\n          0.5", "\"weights\": [\n          0.25");
    let path = dir.path().join("unmet.json");
    std::fs::write(&path, text).unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert!(matches!(out.status.code(), Some(1) | Some(3)), "{:?}", out.status);
}

#[test]
fn check_writes_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.json");
    let out = run(&["check", scenario("it2.json").to_str().unwrap(), "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dest).unwrap()).unwrap();
    assert!((report["margin"].as_f64().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn analyze_examples() {
    let out = run(&["analyze", "--fn", "signed_square", "--point", "0", "--interval", "-1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["class"], "k1");
    assert!((r["k1"]["lo"].as_f64().unwrap() + 2.0).abs() < 1e-6);
    assert!((r["k1"]["hi"].as_f64().unwrap() - 2.0).abs() < 1e-6);

    let r = json(&run(&["analyze", "--fn", "quadratic:2", "--point", "0.3"]));
    assert_eq!(r["class"], "both");
    assert!((r["witness_a"].as_f64().unwrap() - 2.0).abs() < 1e-6);

    let r = json(&run(&["analyze", "--fn", "cubic", "--point", "0.5", "--grid", "1000"]));
    let (lo, hi) = (r["k1"]["lo"].as_f64().unwrap(), r["k1"]["hi"].as_f64().unwrap());
    assert!(lo <= 3.0 && hi >= 3.0 && hi - lo <= 6.0 * 0.002 + 1e-6, "[{lo}, {hi}]");

    assert_eq!(run(&["analyze", "--fn", "nope", "--point", "0"]).status.code(), Some(1));
}

#[test]
fn gen_then_check_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&str, &str, &str)] = &[
        ("mt1", "proper", "signed_square"),
        ("mt1", "literal", "cubic"),
        ("mt2", "proper", "exp"),
        ("mt3", "proper", "neg:exp"),
        ("mt4", "region_restricted", "signed_square"),
        ("mt5", "literal", "cubic"),
        ("mc1", "region_restricted", "exp"),
        ("mc2", "region_restricted", "cubic"),
        ("mc3", "literal", "signed_square"),
        ("it3", "proper", "quartic"),
        ("ic2", "proper", "exp"),
        ("affine", "proper", "quadratic:1"),
    ];
    for (theorem, mode, f) in cases {
        let path = dir.path().join(format!("{theorem}-{mode}.json"));
        let out = run(&["gen", "--theorem", theorem, "--mode", mode, "--seed", "7", "--fn", f, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{theorem}: {}", String::from_utf8_lossy(&out.stderr));
        let out = run(&["check", path.to_str().unwrap()]);
        assert_ne!(out.status.code(), Some(3), "{theorem} {mode}: {}", String::from_utf8_lossy(&out.stdout));
        assert_ne!(out.status.code(), Some(1), "{theorem} {mode}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn gen_rejects_c_outside_the_interval() {
    assert_eq!(run(&["gen", "--theorem", "mt1", "--interval", "-1,1", "--point", "3"]).status.code(), Some(1));
}

#[test]
fn search_exit_codes() {
    let out = run(&["search", "--theorem", "mt1", "--fn", "signed_square", "--budget", "1000", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["results"].as_array().unwrap().is_empty());

    let out = run(&[
        "search", "--theorem", "mt4", "--mode", "literal", "--fn", "signed_square", "--budget", "20", "--seed", "3", "--straddle",
        "--interval", "-3,3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let results = json(&out)["results"].as_array().unwrap().clone();
    assert!(!results.is_empty());
    let margins: Vec<f64> = results.iter().map(|r| r["margin"].as_f64().unwrap()).collect();
    assert!(margins.windows(2).all(|w| w[0] <= w[1]));

    assert_eq!(run(&["search", "--theorem", "mt1", "--fn", "signed_square", "--budget", "0"]).status.code(), Some(1));
}
