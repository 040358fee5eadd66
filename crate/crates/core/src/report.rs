use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{Named, ValidityReport};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    HypothesesUnmet,
}

impl Verdict {
    /// Stable process exit code.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Fails => 2,
            Verdict::HypothesesUnmet => 3,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::HypothesesUnmet => "hypotheses-unmet",
        })
    }
}

/// Every inequality a scenario can be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    /// Jensen for affine combinations.
    Affine,
    /// Two-sided affine refinement under matched spreads.
    Mt1,
    /// Affine refinement with one-sided second-derivative conditions.
    Mt2,
    /// Reverse affine refinement for 3-concave functions.
    Mt3,
    /// Functional Jensen, inside/outside pair.
    It2,
    /// Functional Jensen, single functional.
    Ic1,
    /// Functional Jensen, nested chain.
    Ic2,
    /// Functional Jensen, subunital family.
    Ic3,
    /// Functional Jensen, families inside/outside.
    It3,
    /// Two functional pairs on opposite sides of `c`.
    Mt4,
    Mc1,
    Mc2,
    Mc3,
    /// Four functional families.
    Mt5,
}

impl TheoremId {
    pub const ALL: [TheoremId; 14] = [
        TheoremId::Affine,
        TheoremId::Mt1,
        TheoremId::Mt2,
        TheoremId::Mt3,
        TheoremId::It2,
        TheoremId::Ic1,
        TheoremId::Ic2,
        TheoremId::Ic3,
        TheoremId::It3,
        TheoremId::Mt4,
        TheoremId::Mc1,
        TheoremId::Mc2,
        TheoremId::Mc3,
        TheoremId::Mt5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Affine => "affine",
            TheoremId::Mt1 => "mt1",
            TheoremId::Mt2 => "mt2",
            TheoremId::Mt3 => "mt3",
            TheoremId::It2 => "it2",
            TheoremId::Ic1 => "ic1",
            TheoremId::Ic2 => "ic2",
            TheoremId::Ic3 => "ic3",
            TheoremId::It3 => "it3",
            TheoremId::Mt4 => "mt4",
            TheoremId::Mc1 => "mc1",
            TheoremId::Mc2 => "mc2",
            TheoremId::Mc3 => "mc3",
            TheoremId::Mt5 => "mt5",
        }
    }

    pub fn is_affine(self) -> bool {
        matches!(self, TheoremId::Affine | TheoremId::Mt1 | TheoremId::Mt2 | TheoremId::Mt3)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown theorem `{s}`")))
    }
}

/// How the hypotheses of a result are read.
///
/// `Proper` is the reading under which the inequality is provable;
/// `RegionRestricted` is its name for the functional results (each pair
/// confined to one side of `c`). `Literal` checks only what the statement
/// prints, and may admit counterexamples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Proper,
    RegionRestricted,
    Literal,
}

impl Mode {
    pub fn is_literal(self) -> bool {
        self == Mode::Literal
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Proper => "proper",
            Mode::RegionRestricted => "region_restricted",
            Mode::Literal => "literal",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "proper" => Ok(Mode::Proper),
            "region_restricted" | "region-restricted" => Ok(Mode::RegionRestricted),
            "literal" => Ok(Mode::Literal),
            other => Err(Error::Precondition(format!("unknown mode `{other}`"))),
        }
    }
}

/// Which hypothesis branch of the one-sided-derivative results was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Auto,
    A,
    B,
    C,
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "auto" => Ok(Branch::Auto),
            "a" => Ok(Branch::A),
            "b" => Ok(Branch::B),
            "c" => Ok(Branch::C),
            other => Err(Error::Precondition(format!("unknown branch `{other}`"))),
        }
    }
}

/// Four-term refinement chain `gap_left ≤ mid_left ≤ mid_right ≤ gap_right`
/// (reversed for the 3-concave results). For functional results `gap_*` are
/// the differences `H(f∘h) − L(f∘g)` and `spread_*` the matching
/// square-moment differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub gap_left: f64,
    pub mid_left: f64,
    pub mid_right: f64,
    pub gap_right: f64,
    pub spread_left: f64,
    pub spread_right: f64,
}

impl Chain {
    pub fn new(a: f64, gap_left: f64, spread_left: f64, gap_right: f64, spread_right: f64) -> Self {
        Self {
            gap_left,
            mid_left: 0.5 * a * spread_left,
            mid_right: 0.5 * a * spread_right,
            gap_right,
            spread_left,
            spread_right,
        }
    }

    pub fn values(&self) -> [f64; 4] {
        [self.gap_left, self.mid_left, self.mid_right, self.gap_right]
    }

    /// Ascending-chain slacks (`mid_left − gap_left`, …); the descending
    /// orientation negates each.
    pub fn margins(&self, descending: bool) -> Vec<Named> {
        let s = if descending { -1.0 } else { 1.0 };
        vec![
            Named::new("chain_left", s * (self.mid_left - self.gap_left)),
            Named::new("chain_middle", s * (self.mid_right - self.mid_left)),
            Named::new("chain_right", s * (self.gap_right - self.mid_right)),
        ]
    }

    fn scale(&self) -> f64 {
        self.values().iter().fold(1f64, |m, v| m.max(v.abs()))
    }
}

/// Result of one verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub theorem: TheoremId,
    pub mode: Mode,
    pub verdict: Verdict,
    /// Slack of the main inequality; `None` when hypotheses are unmet.
    pub margin: Option<f64>,
    pub hypotheses: ValidityReport,
    /// Measured residuals of the equality hypotheses, satisfied or not.
    pub residuals: Vec<Named>,
    pub chain: Option<Chain>,
    /// Every slack that enters the verdict.
    pub margins: Vec<Named>,
    pub constant_a: Option<f64>,
    pub branch: Option<Branch>,
    pub tolerance: f64,
    /// Evaluated sides of the inequality, by name.
    #[serde(default)]
    pub values: Vec<Named>,
    pub notes: Vec<String>,
}

impl ChainReport {
    pub fn unmet(theorem: TheoremId, mode: Mode, hypotheses: ValidityReport, residuals: Vec<Named>, tolerance: f64) -> Self {
        Self {
            theorem,
            mode,
            verdict: Verdict::HypothesesUnmet,
            margin: None,
            hypotheses,
            residuals,
            chain: None,
            margins: Vec::new(),
            constant_a: None,
            branch: None,
            tolerance,
            values: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Build a report whose verdict is `holds` iff every margin is at least
    /// `−tolerance · scale`, with `scale` the largest magnitude involved.
    #[allow(clippy::too_many_arguments)]
    pub fn judged(
        theorem: TheoremId,
        mode: Mode,
        residuals: Vec<Named>,
        chain: Option<Chain>,
        main: Named,
        mut margins: Vec<Named>,
        tolerance: f64,
        magnitude: f64,
    ) -> Self {
        let scale = chain.map(|c| c.scale()).unwrap_or(1.0).max(magnitude).max(1.0);
        let margin = main.value;
        margins.push(main);
        let holds = margins.iter().all(|m| m.value >= -tolerance * scale);
        Self {
            theorem,
            mode,
            verdict: if holds { Verdict::Holds } else { Verdict::Fails },
            margin: Some(margin),
            hypotheses: ValidityReport::ok(),
            residuals,
            chain,
            margins,
            constant_a: None,
            branch: None,
            tolerance,
            values: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Smallest slack among `margins`.
    pub fn min_margin(&self) -> Option<f64> {
        self.margins.iter().map(|m| m.value).reduce(f64::min)
    }

    pub fn margin_named(&self, name: &str) -> Option<f64> {
        self.margins.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn residual_named(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn with_a(mut self, a: Option<f64>) -> Self {
        self.constant_a = a;
        self
    }

    pub fn with_branch(mut self, b: Option<Branch>) -> Self {
        self.branch = b;
        self
    }

    pub fn with_values(mut self, values: Vec<Named>) -> Self {
        self.values = values;
        self
    }

    pub fn value_named(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}
