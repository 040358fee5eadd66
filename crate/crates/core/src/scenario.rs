//! Versioned JSON scenario and report files.
//!
//! A scenario file carries a header (theorem, mode, function spec, optional
//! constant and tolerance) and a theorem-specific `scenario` payload:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "theorem": "mt1",
//!   "mode": "proper",
//!   "function": "signed_square",
//!   "scenario": { "interval": [-1, 1], "c": 0, "left": { ... }, "right": { ... } }
//! }
//! ```
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! yields the same bits.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::affine::{verify_affine, verify_mt1, verify_mt2, verify_mt3, Mt1Scenario};
use crate::analysis::{classify_at_point, ConvexityClass};
use crate::domain::{AffineConfig, HullReading, Interval};
use crate::error::{Error, Result};
use crate::funclib::FunctionModel;
use crate::functional::{
    verify_ic1, verify_ic2, verify_ic3, verify_it2, verify_it3, verify_mc1, verify_mc2, verify_mc3, verify_mt4, verify_mt5,
    Ic1Scenario, Ic2Scenario, Ic3Scenario, It2Scenario, It3Scenario, Mc1Scenario, Mc2Scenario, Mc3Scenario, Mt4Scenario,
    Mt5Scenario,
};
use crate::report::{Branch, ChainReport, Mode, TheoremId, Verdict};
use crate::EPS_EQ;

pub const SCHEMA_VERSION: u32 = 1;

/// Payload of the plain affine Jensen inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePayload {
    pub config: AffineConfig,
    #[serde(default)]
    pub hull: HullReading,
}

/// A scenario payload tagged by the theorem it instantiates.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Affine(AffinePayload),
    Mt1(Mt1Scenario),
    Mt2(Mt1Scenario),
    Mt3(Mt1Scenario),
    It2(It2Scenario),
    Ic1(Ic1Scenario),
    Ic2(Ic2Scenario),
    Ic3(Ic3Scenario),
    It3(It3Scenario),
    Mt4(Mt4Scenario),
    Mc1(Mc1Scenario),
    Mc2(Mc2Scenario),
    Mc3(Mc3Scenario),
    Mt5(Mt5Scenario),
}

fn typed<T: DeserializeOwned>(value: &Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::Scenario(format!("scenario.{path}: {}", e.into_inner()))
    })
}

impl Payload {
    pub fn theorem(&self) -> TheoremId {
        match self {
            Payload::Affine(_) => TheoremId::Affine,
            Payload::Mt1(_) => TheoremId::Mt1,
            Payload::Mt2(_) => TheoremId::Mt2,
            Payload::Mt3(_) => TheoremId::Mt3,
            Payload::It2(_) => TheoremId::It2,
            Payload::Ic1(_) => TheoremId::Ic1,
            Payload::Ic2(_) => TheoremId::Ic2,
            Payload::Ic3(_) => TheoremId::Ic3,
            Payload::It3(_) => TheoremId::It3,
            Payload::Mt4(_) => TheoremId::Mt4,
            Payload::Mc1(_) => TheoremId::Mc1,
            Payload::Mc2(_) => TheoremId::Mc2,
            Payload::Mc3(_) => TheoremId::Mc3,
            Payload::Mt5(_) => TheoremId::Mt5,
        }
    }

    pub fn to_value(&self) -> Value {
        let v = match self {
            Payload::Affine(s) => serde_json::to_value(s),
            Payload::Mt1(s) | Payload::Mt2(s) | Payload::Mt3(s) => serde_json::to_value(s),
            Payload::It2(s) => serde_json::to_value(s),
            Payload::Ic1(s) => serde_json::to_value(s),
            Payload::Ic2(s) => serde_json::to_value(s),
            Payload::Ic3(s) => serde_json::to_value(s),
            Payload::It3(s) => serde_json::to_value(s),
            Payload::Mt4(s) => serde_json::to_value(s),
            Payload::Mc1(s) => serde_json::to_value(s),
            Payload::Mc2(s) => serde_json::to_value(s),
            Payload::Mc3(s) => serde_json::to_value(s),
            Payload::Mt5(s) => serde_json::to_value(s),
        };
        v.expect("scenario payloads serialize to JSON")
    }

    pub fn from_value(theorem: TheoremId, value: &Value) -> Result<Self> {
        Ok(match theorem {
            TheoremId::Affine => Payload::Affine(typed(value)?),
            TheoremId::Mt1 => Payload::Mt1(typed(value)?),
            TheoremId::Mt2 => Payload::Mt2(typed(value)?),
            TheoremId::Mt3 => Payload::Mt3(typed(value)?),
            TheoremId::It2 => Payload::It2(typed(value)?),
            TheoremId::Ic1 => Payload::Ic1(typed(value)?),
            TheoremId::Ic2 => Payload::Ic2(typed(value)?),
            TheoremId::Ic3 => Payload::Ic3(typed(value)?),
            TheoremId::It3 => Payload::It3(typed(value)?),
            TheoremId::Mt4 => Payload::Mt4(typed(value)?),
            TheoremId::Mc1 => Payload::Mc1(typed(value)?),
            TheoremId::Mc2 => Payload::Mc2(typed(value)?),
            TheoremId::Mc3 => Payload::Mc3(typed(value)?),
            TheoremId::Mt5 => Payload::Mt5(typed(value)?),
        })
    }
}

/// Seeds and tool version recorded with generated files and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Provenance {
    pub fn new(seed: Option<u64>, source: Option<String>) -> Self {
        Self { tool: "jensen3".into(), version: env!("CARGO_PKG_VERSION").into(), seed, source }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub theorem: TheoremId,
    #[serde(default)]
    pub mode: Mode,
    /// Function spec understood by [`crate::catalog`].
    pub function: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_a: Option<f64>,
    #[serde(default, skip_serializing_if = "is_auto")]
    pub branch: Branch,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub scenario: Value,
}

fn is_auto(b: &Branch) -> bool {
    *b == Branch::Auto
}

impl ScenarioFile {
    pub fn new(payload: &Payload, mode: Mode, function: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            theorem: payload.theorem(),
            mode,
            function: function.into(),
            constant_a: None,
            branch: Branch::Auto,
            tolerance: None,
            provenance: None,
            scenario: payload.to_value(),
        }
    }

    /// Parse the header and the payload. Errors name the line and column of a
    /// syntax or header problem, or the path of the offending payload field.
    pub fn parse(text: &str) -> Result<(Self, Payload)> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path.is_empty() || path == "." {
                Error::Scenario(format!("line {}, column {}: {inner}", inner.line(), inner.column()))
            } else {
                Error::Scenario(format!("{path} (line {}, column {}): {inner}", inner.line(), inner.column()))
            }
        })?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Scenario(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                file.schema_version
            )));
        }
        let payload = Payload::from_value(file.theorem, &file.scenario)?;
        Ok((file, payload))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario files serialize to JSON");
        s.push('\n');
        s
    }
}

/// Dispatch a payload to its verifier.
pub fn run_payload(f: &FunctionModel, payload: &Payload, mode: Mode, branch: Branch, a: Option<f64>, tol: f64) -> Result<ChainReport> {
    match payload {
        Payload::Affine(s) => verify_affine(f, &s.config, s.hull, tol),
        Payload::Mt1(s) => verify_mt1(f, a, s, mode, tol),
        Payload::Mt2(s) => verify_mt2(f, s, branch, tol),
        Payload::Mt3(s) => verify_mt3(f, s, branch, mode, tol),
        Payload::It2(s) => verify_it2(f, s, tol),
        Payload::Ic1(s) => verify_ic1(f, s, tol),
        Payload::Ic2(s) => verify_ic2(f, s, tol),
        Payload::Ic3(s) => verify_ic3(f, s, tol),
        Payload::It3(s) => verify_it3(f, s, tol),
        Payload::Mt4(s) => verify_mt4(f, a, s, mode, tol),
        Payload::Mc1(s) => verify_mc1(f, a, s, mode, tol),
        Payload::Mc2(s) => verify_mc2(f, a, s, mode, tol),
        Payload::Mc3(s) => verify_mc3(f, a, s, mode, tol),
        Payload::Mt5(s) => verify_mt5(f, a, s, mode, tol),
    }
}

/// Verify a parsed scenario file; `tol` overrides the file's tolerance.
pub fn run_scenario(f: &FunctionModel, file: &ScenarioFile, payload: &Payload, tol: Option<f64>) -> Result<ChainReport> {
    let tol = tol.or(file.tolerance).unwrap_or(EPS_EQ);
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::Precondition(format!("tolerance {tol} must be finite and nonnegative")));
    }
    run_payload(f, payload, file.mode, file.branch, file.constant_a, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub function: String,
    #[serde(flatten)]
    pub report: ChainReport,
    pub provenance: Provenance,
}

impl ReportFile {
    pub fn new(function: impl Into<String>, report: ChainReport, provenance: Provenance) -> Self {
        Self { schema_version: SCHEMA_VERSION, function: function.into(), report, provenance }
    }

    pub fn verdict(&self) -> Verdict {
        self.report.verdict
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize to JSON");
        s.push('\n');
        s
    }
}

/// Where a search scenario came from: `sub_seed` regenerates it alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedTrace {
    pub seed: u64,
    pub index: u64,
    pub sub_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub theorem: TheoremId,
    pub mode: Mode,
    /// Smallest slack among the report's margins.
    pub margin: f64,
    pub verdict: Verdict,
    pub seed_trace: SeedTrace,
    pub scenario: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema_version: u32,
    pub theorem: TheoremId,
    pub mode: Mode,
    pub function: String,
    pub budget: u64,
    pub seed: u64,
    /// Scenarios that could not be generated within the retry cap.
    pub skipped: u64,
    pub results: Vec<SearchResult>,
    pub provenance: Provenance,
}

impl SearchReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("search reports serialize to JSON");
        s.push('\n');
        s
    }
}

/// Classification of a function at a point, as printed by `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub function: String,
    pub interval: Interval,
    pub grid: usize,
    #[serde(flatten)]
    pub classification: ConvexityClass,
    pub provenance: Provenance,
}

impl AnalysisReport {
    pub fn run(f: &FunctionModel, function: impl Into<String>, c: f64, interval: Interval, grid: usize) -> Result<Self> {
        let classification = classify_at_point(f, c, interval, grid)?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            function: function.into(),
            interval,
            grid,
            classification,
            provenance: Provenance::new(None, None),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("analysis reports serialize to JSON");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MT1: &str = r#"{
  "schema_version": 1,
  "theorem": "mt1",
  "function": "signed_square",
  "constant_a": 0,
  "scenario": {
    "interval": [-1, 1],
    "c": 0,
    "left": {"plus_a": {"points": [-1], "weights": [0.5]}, "plus_b": {"points": [0], "weights": [0.5]}},
    "right": {"plus_a": {"points": [0], "weights": [0.5]}, "plus_b": {"points": [1], "weights": [0.5]}}
  }
}"#;

    #[test]
    fn parses_and_runs_mt1() {
        let (file, payload) = ScenarioFile::parse(MT1).unwrap();
        assert_eq!(file.mode, Mode::Proper);
        let f = crate::catalog(&file.function).unwrap();
        let r = run_scenario(&f, &file, &payload, None).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.chain.unwrap().values(), [-0.25, 0.0, 0.0, 0.25]);
    }

    #[test]
    fn round_trip_is_bit_faithful() {
        let (file, payload) = ScenarioFile::parse(MT1).unwrap();
        let mut again = ScenarioFile::new(&payload, file.mode, file.function.clone());
        again.constant_a = file.constant_a;
        let (file2, payload2) = ScenarioFile::parse(&again.to_json()).unwrap();
        assert_eq!(payload, payload2);
        assert_eq!(file2.constant_a, Some(0.0));
        let x = 0.1f64 + 0.2;
        let v: f64 = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        assert_eq!(v.to_bits(), x.to_bits());
    }

    #[test]
    fn payload_errors_name_the_field() {
        let bad = MT1.replace("\"weights\": [0.5]}, \"plus_b\": {\"points\": [0]", "\"weights\": [0.5, 0.5]}, \"plus_b\": {\"points\": [0]");
        let err = ScenarioFile::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("scenario.left"), "{err}");
    }

    #[test]
    fn header_errors_name_the_line() {
        let err = ScenarioFile::parse("{\n  \"schema_version\": 1,\n  \"theorem\": \"mt9\"\n}").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let err = ScenarioFile::parse(&MT1.replace("\"schema_version\": 1", "\"schema_version\": 2")).unwrap_err();
        assert!(err.to_string().contains("schema_version"));
    }
}
