//! Browser bindings: function analysis with curve samples, scenario checking,
//! and a probe of the shared-inner-interval reading of the two-pair result.
//!
//! Every export takes plain values and returns a JSON string. The plain Rust
//! functions behind them are public so they can be tested natively.

use jensen3::funclib::{d2_one_sided, eval_fn};
use jensen3::functional::{verify_mt4, DiscreteFunctional, FunctionOnOmega, Mt4Scenario, PairValues};
use jensen3::scenario::{run_scenario, AnalysisReport, ReportFile, ScenarioFile, Provenance};
use jensen3::scengen::solve_two_point;
use jensen3::{catalog, Interval, Mode, Side, EPS_EQ};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Sample {
    x: f64,
    f: f64,
    d2: f64,
}

#[derive(Serialize)]
struct Analysis {
    report: AnalysisReport,
    samples: Vec<Sample>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Classification of `spec` at `c` plus `n` samples of `f` and its
/// one-sided second derivative across `[lo, hi]`.
pub fn analyze_json(spec: &str, c: f64, lo: f64, hi: f64, grid: usize, n: usize) -> Result<String, String> {
    let f = catalog(spec).map_err(err)?;
    let interval = Interval::new(lo, hi).map_err(err)?;
    if !interval.contains_interior(c) {
        return Err(format!("c = {c} must lie strictly inside [{lo}, {hi}]"));
    }
    let report = AnalysisReport::run(&f, spec, c, interval, grid.max(2)).map_err(err)?;
    let n = n.clamp(2, 2000);
    let step = (hi - lo) / (n - 1) as f64;
    let samples = (0..n)
        .map(|i| {
            let x = if i + 1 == n { hi } else { lo + i as f64 * step };
            let side = if i + 1 == n { Side::Minus } else { Side::Plus };
            Ok(Sample { x, f: eval_fn(&f, x)?, d2: d2_one_sided(&f, x, side, None)? })
        })
        .collect::<jensen3::Result<Vec<_>>>()
        .map_err(err)?;
    serde_json::to_string(&Analysis { report, samples }).map_err(err)
}

/// Verify the text of a scenario file and return its report.
pub fn check_json(text: &str) -> Result<String, String> {
    let (file, payload) = ScenarioFile::parse(text).map_err(err)?;
    let f = catalog(&file.function).map_err(err)?;
    let report = run_scenario(&f, &file, &payload, None).map_err(err)?;
    Ok(ReportFile::new(&file.function, report, Provenance::new(None, Some("browser".into()))).to_json())
}

#[derive(Serialize)]
struct Probe {
    scenario: Mt4Scenario,
    literal: ProbeSide,
    region: ProbeSide,
}

#[derive(Serialize)]
struct ProbeSide {
    verdict: String,
    margin: Option<f64>,
    diffs: Option<(f64, f64)>,
    unmet: Vec<String>,
}

/// Two pairs sharing the inner interval `[−1, 1]` on `[−3, 3]` with `c = 0`:
/// the first pair has constant `g = 0.5` and `h = (−1, 2)`; the second has
/// `g = (0.5 − s, 0.5 + s)` and two-point `h` solving the mean and
/// square-moment constraints. `s = 0.3` is the documented failing instance.
pub fn straddle_probe_json(spec: &str, s: f64) -> Result<String, String> {
    if !(s > 0.0 && s <= 0.5) {
        return Err(format!("spread parameter {s} must lie in (0, 0.5]"));
    }
    let f = catalog(spec).map_err(err)?;
    let fo = |v: Vec<f64>| FunctionOnOmega::new(v).map_err(err);
    let half = DiscreteFunctional::new(vec![0.5, 0.5]).map_err(err)?;
    let inner = Interval::new(-1.0, 1.0).map_err(err)?;
    let d = 0.5 * (1.0 + 4.0) - 0.25;
    let g2 = [0.5 - s, 0.5 + s];
    let second = d + 0.5 * (g2[0] * g2[0] + g2[1] * g2[1]);
    let (u, v) = solve_two_point(0.5, second).map_err(err)?;
    let scenario = Mt4Scenario {
        outer: Interval::new(-3.0, 3.0).map_err(err)?,
        c: 0.0,
        l: half.clone(),
        h_functional: half,
        pair1: PairValues { g: fo(vec![0.5, 0.5])?, h: fo(vec![-1.0, 2.0])?, inner },
        pair2: PairValues { g: fo(g2.to_vec())?, h: fo(vec![v, u])?, inner },
    };
    let side = |mode: Mode| -> Result<ProbeSide, String> {
        let r = verify_mt4(&f, None, &scenario, mode, EPS_EQ).map_err(err)?;
        let diffs = r.value_named("diff1").zip(r.value_named("diff2"));
        Ok(ProbeSide {
            verdict: r.verdict.to_string(),
            margin: r.margin,
            diffs,
            unmet: r.hypotheses.violations().iter().map(|v| v.name.clone()).collect(),
        })
    };
    let probe = Probe { literal: side(Mode::Literal)?, region: side(Mode::RegionRestricted)?, scenario };
    serde_json::to_string(&probe).map_err(err)
}

#[wasm_bindgen]
pub fn analyze(spec: &str, c: f64, lo: f64, hi: f64, grid: usize, samples: usize) -> Result<String, JsError> {
    analyze_json(spec, c, lo, hi, grid, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn check(text: &str) -> Result<String, JsError> {
    check_json(text).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn straddle_probe(spec: &str, s: f64) -> Result<String, JsError> {
    straddle_probe_json(spec, s).map_err(|e| JsError::new(&e))
}

/// Bundled example scenario files, by name.
#[wasm_bindgen]
pub fn example(name: &str) -> Option<String> {
    let text = match name {
        "mt1_mirrored" => include_str!("../../../scenarios/mt1_mirrored.json"),
        "mt4_region" => include_str!("../../../scenarios/mt4_region.json"),
        "mt4_literal_straddle" => include_str!("../../../scenarios/mt4_literal_straddle.json"),
        "it2" => include_str!("../../../scenarios/it2.json"),
        _ => return None,
    };
    Some(text.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn analyze_signed_square() {
        let v: Value = serde_json::from_str(&analyze_json("signed_square", 0.0, -1.0, 1.0, 1000, 11).unwrap()).unwrap();
        assert_eq!(v["report"]["class"], "k1");
        let samples = v["samples"].as_array().unwrap();
        assert_eq!(samples.len(), 11);
        assert_eq!(samples[0]["d2"].as_f64().unwrap(), -2.0);
        assert_eq!(samples[10]["d2"].as_f64().unwrap(), 2.0);
        assert!(analyze_json("signed_square", 2.0, -1.0, 1.0, 100, 5).is_err());
    }

    #[test]
    fn check_bundled_examples() {
        for (name, verdict) in [("mt1_mirrored", "holds"), ("mt4_region", "holds"), ("mt4_literal_straddle", "fails"), ("it2", "holds")] {
            let v: Value = serde_json::from_str(&check_json(&example(name).unwrap()).unwrap()).unwrap();
            assert_eq!(v["verdict"], verdict, "{name}");
        }
        assert!(example("nope").is_none());
        assert!(check_json("{").unwrap_err().contains("line"));
    }

    #[test]
    fn probe_reproduces_the_documented_instance() {
        let v: Value = serde_json::from_str(&straddle_probe_json("signed_square", 0.3).unwrap()).unwrap();
        assert_eq!(v["literal"]["verdict"], "fails");
        let m = v["literal"]["margin"].as_f64().unwrap();
        assert!((m - (0.5 * 9.36f64.sqrt() - 1.59)).abs() < 1e-12);
        assert_eq!(v["region"]["verdict"], "hypotheses-unmet");
        assert!(straddle_probe_json("signed_square", 0.0).is_err());
    }
}
