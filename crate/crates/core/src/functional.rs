//! Positive linear functionals on a finite sample domain and the functional
//! forms of Jensen's inequality and its refinements.
//!
//! A functional is a nonnegative weight vector `w`, acting on a value vector
//! `u` as `L(u) = Σ wᵢ uᵢ`; it is unital when the weights sum to one. A
//! [`Term`] pairs a functional with the function it is applied to.
//!
//! The refinements for functions 3-convex at `c` compare a pair of differences
//! `H(f∘h) − L(f∘g)` through `(A/2)(H(h²) − L(g²))`. In region-restricted mode
//! the first pair (or the unstarred families, or the `g`-family) lives in
//! `I ∩ (−∞, c]` and the second in `I ∩ [c, ∞)`, each with its own inner
//! interval. Literal mode imposes one shared inner interval and no side.

use serde::{Deserialize, Serialize};

use crate::analysis::{convex_on_grid, resolve_constant, ConstantResolution};
use crate::domain::{Interval, Named, ValidityReport};
use crate::error::{Error, Result};
use crate::funclib::{eval_fn, ClassKind, FunctionModel};
use crate::report::{Chain, ChainReport, Mode, TheoremId};
use crate::{CHECK_GRID, DEFAULT_GRID, EPS_EQ};

/// Nonnegative weights over `Ω = {1, …, n}`. Serialized as a plain array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiscreteFunctional {
    weights: Vec<f64>,
}

impl DiscreteFunctional {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Structure("functional needs at least one weight".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Structure(format!("functional weight {w} is not a finite nonnegative number")));
        }
        Ok(Self { weights })
    }

    /// Equal weights `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `L(1)`.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        (self.total() - 1.0).abs() <= tol
    }
}

impl TryFrom<Vec<f64>> for DiscreteFunctional {
    type Error = Error;

    fn try_from(w: Vec<f64>) -> Result<Self> {
        Self::new(w)
    }
}

impl From<DiscreteFunctional> for Vec<f64> {
    fn from(l: DiscreteFunctional) -> Self {
        l.weights
    }
}

/// Finite values on `Ω`. Serialized as a plain array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FunctionOnOmega {
    values: Vec<f64>,
}

impl FunctionOnOmega {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Structure("function on the sample domain needs at least one value".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Structure(format!("value {v} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|v| f(*v)).collect() }
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl TryFrom<Vec<f64>> for FunctionOnOmega {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FunctionOnOmega> for Vec<f64> {
    fn from(u: FunctionOnOmega) -> Self {
        u.values
    }
}

/// `Σ wᵢ uᵢ`.
pub fn apply(l: &DiscreteFunctional, u: &FunctionOnOmega) -> Result<f64> {
    if l.len() != u.len() {
        return Err(Error::Structure(format!("functional has {} weights but function has {} values", l.len(), u.len())));
    }
    Ok(l.weights.iter().zip(&u.values).map(|(w, v)| w * v).sum())
}

/// `Σ wᵢ f(uᵢ)`, every `uᵢ` checked against the domain of `f`.
pub fn apply_composed(f: &FunctionModel, l: &DiscreteFunctional, u: &FunctionOnOmega) -> Result<f64> {
    if l.len() != u.len() {
        return Err(Error::Structure(format!("functional has {} weights but function has {} values", l.len(), u.len())));
    }
    let mut sum = 0.0;
    for (w, v) in l.weights.iter().zip(&u.values) {
        sum += w * eval_fn(f, *v)?;
    }
    Ok(sum)
}

/// `Σ wᵢ uᵢ²`.
pub fn apply_square(l: &DiscreteFunctional, u: &FunctionOnOmega) -> Result<f64> {
    apply(l, &u.map(|v| v * v))
}

/// A functional together with the function it acts on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTerm")]
pub struct Term {
    pub weights: DiscreteFunctional,
    pub values: FunctionOnOmega,
}

#[derive(Deserialize)]
struct RawTerm {
    weights: DiscreteFunctional,
    values: FunctionOnOmega,
}

impl TryFrom<RawTerm> for Term {
    type Error = Error;

    fn try_from(raw: RawTerm) -> Result<Self> {
        Term::new(raw.weights, raw.values)
    }
}

impl Term {
    pub fn new(weights: DiscreteFunctional, values: FunctionOnOmega) -> Result<Self> {
        if weights.len() != values.len() {
            return Err(Error::Structure(format!(
                "term has {} weights but {} values",
                weights.len(),
                values.len()
            )));
        }
        Ok(Self { weights, values })
    }

    pub fn from_vecs(weights: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(DiscreteFunctional::new(weights)?, FunctionOnOmega::new(values)?)
    }

    pub fn total(&self) -> f64 {
        self.weights.total()
    }

    pub fn mean(&self) -> f64 {
        self.weights.weights.iter().zip(&self.values.values).map(|(w, v)| w * v).sum()
    }

    pub fn square_moment(&self) -> f64 {
        self.weights.weights.iter().zip(&self.values.values).map(|(w, v)| w * v * v).sum()
    }

    pub fn composed(&self, f: &FunctionModel) -> Result<f64> {
        apply_composed(f, &self.weights, &self.values)
    }
}

fn family_total(ts: &[Term]) -> f64 {
    ts.iter().map(Term::total).sum()
}

fn family_mean(ts: &[Term]) -> f64 {
    ts.iter().map(Term::mean).sum()
}

fn family_square(ts: &[Term]) -> f64 {
    ts.iter().map(Term::square_moment).sum()
}

fn family_composed(f: &FunctionModel, ts: &[Term]) -> Result<f64> {
    ts.iter().map(|t| t.composed(f)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeMode {
    /// Every value in `[a, b]`.
    Inside,
    /// Every value in `I` and none in `(a, b)`.
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeConstraint {
    pub inner: Interval,
    pub outer: Interval,
    pub mode: RangeMode,
}

impl RangeConstraint {
    pub fn new(inner: Interval, outer: Interval, mode: RangeMode) -> Result<Self> {
        if !outer.contains_interval(&inner, 0.0) {
            return Err(Error::Structure(format!(
                "inner [{}, {}] is not inside outer [{}, {}]",
                inner.lo(),
                inner.hi(),
                outer.lo(),
                outer.hi()
            )));
        }
        Ok(Self { inner, outer, mode })
    }
}

/// Range check with the default tolerance.
pub fn check_range(u: &FunctionOnOmega, rc: &RangeConstraint) -> ValidityReport {
    check_range_tol(u, rc, EPS_EQ)
}

/// Violations are named `inside@i`, `outside@i` or `in_outer@i` and carry the
/// offending distance.
pub fn check_range_tol(u: &FunctionOnOmega, rc: &RangeConstraint, tol: f64) -> ValidityReport {
    let (a, b) = (rc.inner.lo(), rc.inner.hi());
    let t = tol * rc.outer.scale();
    let mut report = ValidityReport::ok();
    for (i, &v) in u.values.iter().enumerate() {
        match rc.mode {
            RangeMode::Inside => {
                let excess = (a - v).max(v - b);
                report.require(excess <= t, format!("inside@{i}"), excess);
            }
            RangeMode::Outside => {
                let excess = (rc.outer.lo() - v).max(v - rc.outer.hi());
                report.require(excess <= t, format!("in_outer@{i}"), excess);
                let depth = (v - a).min(b - v);
                report.require(depth <= t, format!("outside@{i}"), depth);
            }
        }
    }
    report
}

fn check_in(report: &mut ValidityReport, name: &str, u: &FunctionOnOmega, inner: Interval, outer: Interval, mode: RangeMode, tol: f64) {
    if !outer.contains_interval(&inner, tol * outer.scale()) {
        report.push(format!("{name}.inner_in_outer"), (outer.lo() - inner.lo()).max(inner.hi() - outer.hi()));
        return;
    }
    let rc = RangeConstraint { inner, outer, mode };
    report.merge(name, check_range_tol(u, &rc, tol));
}

fn rel(tol: f64, xs: &[f64]) -> f64 {
    tol * xs.iter().fold(1f64, |m, x| m.max(x.abs()))
}

fn require_unital(report: &mut ValidityReport, name: &str, total: f64, tol: f64) {
    let d = total - 1.0;
    report.require(d.abs() <= tol, format!("unit_mass.{name}"), d);
}

fn require_equal(report: &mut ValidityReport, residuals: &mut Vec<Named>, name: &str, x: f64, y: f64, tol: f64) {
    let d = x - y;
    report.require(d.abs() <= rel(tol, &[x, y]), name.to_string(), d);
    residuals.push(Named::new(name, d));
}

fn require_outer_in_domain(f: &FunctionModel, outer: Interval) -> Result<()> {
    if !f.domain().contains_interval(&outer, 0.0) {
        return Err(Error::OutOfDomain { x: outer.lo(), lo: f.domain().lo(), hi: f.domain().hi() });
    }
    Ok(())
}

fn require_convex(report: &mut ValidityReport, f: &FunctionModel, interval: Interval) -> Result<()> {
    let (ok, min) = convex_on_grid(f, interval, CHECK_GRID)?;
    report.require(ok, "f_convex", min);
    Ok(())
}

fn magnitude(xs: &[f64]) -> f64 {
    xs.iter().fold(1f64, |m, x| m.max(x.abs()))
}

fn check_len(l: &DiscreteFunctional, u: &FunctionOnOmega) -> Result<()> {
    if l.len() != u.len() {
        return Err(Error::Structure(format!("functional has {} weights but function has {} values", l.len(), u.len())));
    }
    Ok(())
}

/// Inside/outside pair of unital functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct It2Scenario {
    pub inner: Interval,
    pub outer: Interval,
    #[serde(rename = "L")]
    pub l: DiscreteFunctional,
    pub g: FunctionOnOmega,
    #[serde(rename = "H")]
    pub h_functional: DiscreteFunctional,
    pub h: FunctionOnOmega,
}

/// `L(f∘g) ≤ H(f∘h)` for convex `f`, `g` valued in `[a, b]`, `h` valued
/// outside `(a, b)` and `L(g) = H(h)`.
pub fn verify_it2(f: &FunctionModel, s: &It2Scenario, tol: f64) -> Result<ChainReport> {
    check_len(&s.l, &s.g)?;
    check_len(&s.h_functional, &s.h)?;
    let inside = [Term::new(s.l.clone(), s.g.clone())?];
    let outside = [Term::new(s.h_functional.clone(), s.h.clone())?];
    families_report(TheoremId::It2, f, s.inner, s.outer, &inside, &outside, tol)
}

/// Families `(Lᵢ, gᵢ)` inside and `(Hⱼ, hⱼ)` outside with totals one each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct It3Scenario {
    pub inner: Interval,
    pub outer: Interval,
    pub inside: Vec<Term>,
    pub outside: Vec<Term>,
}

/// `Σ Lᵢ(f∘gᵢ) ≤ Σ Hⱼ(f∘hⱼ)` when `Σ Lᵢ(gᵢ) = Σ Hⱼ(hⱼ)`.
pub fn verify_it3(f: &FunctionModel, s: &It3Scenario, tol: f64) -> Result<ChainReport> {
    families_report(TheoremId::It3, f, s.inner, s.outer, &s.inside, &s.outside, tol)
}

fn families_report(
    theorem: TheoremId,
    f: &FunctionModel,
    inner: Interval,
    outer: Interval,
    inside: &[Term],
    outside: &[Term],
    tol: f64,
) -> Result<ChainReport> {
    require_outer_in_domain(f, outer)?;
    if inside.is_empty() || outside.is_empty() {
        return Err(Error::Structure("both families need at least one term".into()));
    }
    let mut hyp = ValidityReport::ok();
    let mut residuals = Vec::new();
    require_unital(&mut hyp, "inside", family_total(inside), tol);
    require_unital(&mut hyp, "outside", family_total(outside), tol);
    for (i, t) in inside.iter().enumerate() {
        check_in(&mut hyp, &format!("g{i}"), &t.values, inner, outer, RangeMode::Inside, tol);
    }
    for (j, t) in outside.iter().enumerate() {
        check_in(&mut hyp, &format!("h{j}"), &t.values, inner, outer, RangeMode::Outside, tol);
    }
    require_equal(&mut hyp, &mut residuals, "mean_equality", family_mean(inside), family_mean(outside), tol);
    require_convex(&mut hyp, f, outer)?;
    if !hyp.is_valid() {
        return Ok(ChainReport::unmet(theorem, Mode::Proper, hyp, residuals, tol));
    }
    let lhs = family_composed(f, inside)?;
    let rhs = family_composed(f, outside)?;
    Ok(ChainReport::judged(theorem, Mode::Proper, residuals, None, Named::new("main", rhs - lhs), vec![], tol, magnitude(&[lhs, rhs]))
        .with_values(vec![Named::new("lhs", lhs), Named::new("rhs", rhs)]))
}

/// A single unital functional and a function valued in `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ic1Scenario {
    pub inner: Interval,
    pub outer: Interval,
    #[serde(rename = "L")]
    pub l: DiscreteFunctional,
    pub g: FunctionOnOmega,
}

/// `f(L(g)) ≤ L(f∘g)`; the margin is `L(f∘g) − f(L(g))`.
pub fn verify_ic1(f: &FunctionModel, s: &Ic1Scenario, tol: f64) -> Result<ChainReport> {
    check_len(&s.l, &s.g)?;
    require_outer_in_domain(f, s.outer)?;
    let mut hyp = ValidityReport::ok();
    require_unital(&mut hyp, "L", s.l.total(), tol);
    check_in(&mut hyp, "g", &s.g, s.inner, s.outer, RangeMode::Inside, tol);
    require_convex(&mut hyp, f, s.inner)?;
    if !hyp.is_valid() {
        return Ok(ChainReport::unmet(TheoremId::Ic1, Mode::Proper, hyp, vec![], tol));
    }
    let lhs = eval_fn(f, apply(&s.l, &s.g)?)?;
    let rhs = apply_composed(f, &s.l, &s.g)?;
    Ok(ChainReport::judged(TheoremId::Ic1, Mode::Proper, vec![], None, Named::new("main", rhs - lhs), vec![], tol, magnitude(&[lhs, rhs]))
        .with_values(vec![Named::new("lhs", lhs), Named::new("rhs", rhs)]))
}

/// Nested chain: level 0 inside `intervals[0]`, level `k` inside `intervals[k]`
/// and outside the open `intervals[k−1]`, the last level in `outer` and outside
/// the open last interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ic2Scenario {
    pub intervals: Vec<Interval>,
    pub outer: Interval,
    pub levels: Vec<Term>,
}

fn nesting(hyp: &mut ValidityReport, prefix: &str, levels: &[&FunctionOnOmega], intervals: &[Interval], outer: Interval, tol: f64) {
    let t = tol * outer.scale();
    for (k, w) in intervals.windows(2).enumerate() {
        let ok = w[1].contains_interval(&w[0], t);
        hyp.require(ok, format!("{prefix}nested@{k}"), (w[1].lo() - w[0].lo()).max(w[0].hi() - w[1].hi()));
    }
    let n = levels.len();
    for (k, u) in levels.iter().enumerate() {
        let name = format!("{prefix}level{k}");
        let container = if k + 1 == n { outer } else { intervals[k] };
        if k == 0 {
            check_in(hyp, &name, u, container, outer, RangeMode::Inside, tol);
        } else {
            check_in(hyp, &name, u, intervals[k - 1], container, RangeMode::Outside, tol);
        }
    }
}

/// `Lᵢ(f∘gᵢ) ≤ Lᵢ₊₁(f∘gᵢ₊₁)` for every link, given equal means along the chain.
pub fn verify_ic2(f: &FunctionModel, s: &Ic2Scenario, tol: f64) -> Result<ChainReport> {
    require_outer_in_domain(f, s.outer)?;
    let n = s.levels.len();
    if n < 2 || s.intervals.len() != n - 1 {
        return Err(Error::Structure(format!(
            "{n} levels need {} nested intervals, got {}",
            n.saturating_sub(1),
            s.intervals.len()
        )));
    }
    let mut hyp = ValidityReport::ok();
    let mut residuals = Vec::new();
    for (k, t) in s.levels.iter().enumerate() {
        require_unital(&mut hyp, &format!("L{k}"), t.total(), tol);
    }
    let values: Vec<_> = s.levels.iter().map(|t| &t.values).collect();
    nesting(&mut hyp, "", &values, &s.intervals, s.outer, tol);
    for (k, w) in s.levels.windows(2).enumerate() {
        require_equal(&mut hyp, &mut residuals, &format!("mean_equality@{k}"), w[0].mean(), w[1].mean(), tol);
    }
    require_convex(&mut hyp, f, s.outer)?;
    if !hyp.is_valid() {
        return Ok(ChainReport::unmet(TheoremId::Ic2, Mode::Proper, hyp, residuals, tol));
    }
    let sides = s.levels.iter().map(|t| t.composed(f)).collect::<Result<Vec<_>>>()?;
    let links: Vec<Named> = sides.windows(2).enumerate().map(|(k, w)| Named::new(format!("link@{k}"), w[1] - w[0])).collect();
    let worst = links.iter().map(|m| m.value).fold(f64::INFINITY, f64::min);
    let values = sides.iter().enumerate().map(|(k, v)| Named::new(format!("level@{k}"), *v)).collect();
    Ok(ChainReport::judged(TheoremId::Ic2, Mode::Proper, residuals, None, Named::new("main", worst), links, tol, magnitude(&sides))
        .with_values(values))
}

/// Subunital family with totals summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ic3Scenario {
    pub outer: Interval,
    pub terms: Vec<Term>,
}

/// `Σ Lᵢ(gᵢ) ∈ I` and `f(Σ Lᵢ(gᵢ)) ≤ Σ Lᵢ(f∘gᵢ)`.
pub fn verify_ic3(f: &FunctionModel, s: &Ic3Scenario, tol: f64) -> Result<ChainReport> {
    require_outer_in_domain(f, s.outer)?;
    if s.terms.is_empty() {
        return Err(Error::Structure("family needs at least one term".into()));
    }
    let mut hyp = ValidityReport::ok();
    require_unital(&mut hyp, "family", family_total(&s.terms), tol);
    for (i, t) in s.terms.iter().enumerate() {
        check_in(&mut hyp, &format!("g{i}"), &t.values, s.outer, s.outer, RangeMode::Inside, tol);
    }
    require_convex(&mut hyp, f, s.outer)?;
    if !hyp.is_valid() {
        return Ok(ChainReport::unmet(TheoremId::Ic3, Mode::Proper, hyp, vec![], tol));
    }
    let v = family_mean(&s.terms);
    let inclusion = Named::new("inclusion", (v - s.outer.lo()).min(s.outer.hi() - v));
    let lhs = eval_fn(f, v.clamp(s.outer.lo(), s.outer.hi()))?;
    let rhs = family_composed(f, &s.terms)?;
    Ok(ChainReport::judged(TheoremId::Ic3, Mode::Proper, vec![], None, Named::new("main", rhs - lhs), vec![inclusion], tol, magnitude(&[lhs, rhs]))
        .with_values(vec![Named::new("lhs", lhs), Named::new("rhs", rhs), Named::new("aggregate", v)]))
}

/// Values of one pair together with its inner interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairValues {
    pub g: FunctionOnOmega,
    pub h: FunctionOnOmega,
    pub inner: Interval,
}

/// Two pairs sharing the functionals `L` and `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mt4Scenario {
    pub outer: Interval,
    pub c: f64,
    #[serde(rename = "L")]
    pub l: DiscreteFunctional,
    #[serde(rename = "H")]
    pub h_functional: DiscreteFunctional,
    pub pair1: PairValues,
    pub pair2: PairValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Left,
    Right,
}

fn region(outer: Interval, c: f64, side: Region) -> Interval {
    let (lo, hi) = match side {
        Region::Left => (outer.lo(), c.min(outer.hi())),
        Region::Right => (c.max(outer.lo()), outer.hi()),
    };
    Interval::new(lo, hi.max(lo)).unwrap_or(outer)
}

fn normalize_mode(mode: Mode) -> Mode {
    if mode.is_literal() {
        Mode::Literal
    } else {
        Mode::RegionRestricted
    }
}

/// Outer range for one side: the half of `outer` at `c` when region-restricted.
fn side_range(outer: Interval, c: f64, side: Region, mode: Mode) -> Interval {
    if mode.is_literal() {
        outer
    } else {
        region(outer, c, side)
    }
}

fn shared_inner(hyp: &mut ValidityReport, mode: Mode, a: Interval, b: Interval) {
    if mode.is_literal() {
        let d = (a.lo() - b.lo()).abs().max((a.hi() - b.hi()).abs());
        hyp.require(d == 0.0, "shared_inner", d);
    }
}

fn resolve_k1(hyp: &mut ValidityReport, f: &FunctionModel, c: f64, outer: Interval, a: Option<f64>) -> Result<Option<f64>> {
    if !outer.contains_interior(c) {
        hyp.push("c_interior", c);
        return Ok(None);
    }
    if !hyp.is_valid() {
        return Ok(None);
    }
    Ok(match resolve_constant(f, c, outer, ClassKind::K1, a, DEFAULT_GRID)? {
        ConstantResolution::Admissible(a) => Some(a),
        ConstantResolution::Rejected(v) => {
            hyp.push(v.name, v.value);
            None
        }
    })
}

/// Verdict on `second − first`; the four-term chain enters the verdict only
/// when region-restricted.
#[allow(clippy::too_many_arguments)]
fn two_sided(
    theorem: TheoremId,
    mode: Mode,
    a: f64,
    first: (f64, f64),
    second: (f64, f64),
    residuals: Vec<Named>,
    values: Vec<Named>,
    tol: f64,
) -> ChainReport {
    let chain = Chain::new(a, first.0, first.1, second.0, second.1);
    let margins = if mode.is_literal() { vec![] } else { chain.margins(false) };
    let mut report = ChainReport::judged(theorem, mode, residuals, Some(chain), Named::new("main", second.0 - first.0), margins, tol, 1.0)
        .with_a(Some(a))
        .with_values(values);
    if mode.is_literal() {
        report = report.note("literal reading: chain reported for information, verdict on the main inequality only");
    }
    report
}

/// Two pairs with equal means and equal square-moment differences:
/// `H(f∘h₁) − L(f∘g₁) ≤ H(f∘h₂) − L(f∘g₂)`.
pub fn verify_mt4(f: &FunctionModel, a: Option<f64>, s: &Mt4Scenario, mode: Mode, tol: f64) -> Result<ChainReport> {
    let mode = normalize_mode(mode);
    require_outer_in_domain(f, s.outer)?;
    for p in [&s.pair1, &s.pair2] {
        check_len(&s.l, &p.g)?;
        check_len(&s.h_functional, &p.h)?;
    }
    let mut hyp = ValidityReport::ok();
    let mut residuals = Vec::new();
    require_unital(&mut hyp, "L", s.l.total(), tol);
    require_unital(&mut hyp, "H", s.h_functional.total(), tol);
    shared_inner(&mut hyp, mode, s.pair1.inner, s.pair2.inner);
    let mut sides = Vec::new();
    for (k, (p, side)) in [(&s.pair1, Region::Left), (&s.pair2, Region::Right)].into_iter().enumerate() {
        let range = side_range(s.outer, s.c, side, mode);
        let name = format!("pair{}", k + 1);
        check_in(&mut hyp, &format!("{name}.g"), &p.g, p.inner, range, RangeMode::Inside, tol);
        check_in(&mut hyp, &format!("{name}.h"), &p.h, p.inner, range, RangeMode::Outside, tol);
        let (lg, hh) = (apply(&s.l, &p.g)?, apply(&s.h_functional, &p.h)?);
        require_equal(&mut hyp, &mut residuals, &format!("mean_equality@{}", k + 1), lg, hh, tol);
        sides.push(apply_square(&s.h_functional, &p.h)? - apply_square(&s.l, &p.g)?);
    }
    require_equal(&mut hyp, &mut residuals, "square_moment_equality", sides[0], sides[1], tol);
    let Some(a) = resolve_k1(&mut hyp, f, s.c, s.outer, a)? else {
        return Ok(ChainReport::unmet(TheoremId::Mt4, mode, hyp, residuals, tol));
    };
    let diff1 = apply_composed(f, &s.h_functional, &s.pair1.h)? - apply_composed(f, &s.l, &s.pair1.g)?;
    let diff2 = apply_composed(f, &s.h_functional, &s.pair2.h)? - apply_composed(f, &s.l, &s.pair2.g)?;
    let values = vec![Named::new("diff1", diff1), Named::new("diff2", diff2)];
    Ok(two_sided(TheoremId::Mt4, mode, a, (diff1, sides[0]), (diff2, sides[1]), residuals, values, tol))
}

/// Values of one function with its inner interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placed {
    pub values: FunctionOnOmega,
    pub inner: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mc1Scenario {
    pub outer: Interval,
    pub c: f64,
    #[serde(rename = "L")]
    pub l: DiscreteFunctional,
    pub g1: Placed,
    pub g2: Placed,
}

fn jensen_gap(f: &FunctionModel, l: &DiscreteFunctional, g: &FunctionOnOmega) -> Result<f64> {
    Ok(apply_composed(f, l, g)? - eval_fn(f, apply(l, g)?)?)
}

/// Equal variances under one unital `L`: the Jensen gap of `g₁` is at most that of `g₂`.
pub fn verify_mc1(f: &FunctionModel, a: Option<f64>, s: &Mc1Scenario, mode: Mode, tol: f64) -> Result<ChainReport> {
    let mode = normalize_mode(mode);
    require_outer_in_domain(f, s.outer)?;
    check_len(&s.l, &s.g1.values)?;
    check_len(&s.l, &s.g2.values)?;
    let mut hyp = ValidityReport::ok();
    let mut residuals = Vec::new();
    require_unital(&mut hyp, "L", s.l.total(), tol);
    shared_inner(&mut hyp, mode, s.g1.inner, s.g2.inner);
    let mut variances = Vec::new();
    for (k, (p, side)) in [(&s.g1, Region::Left), (&s.g2, Region::Right)].into_iter().enumerate() {
        let range = side_range(s.outer, s.c, side, mode);
        check_in(&mut hyp, &format!("g{}", k + 1), &p.values, p.inner, range, RangeMode::Inside, tol);
        let m = apply(&s.l, &p.values)?;
        variances.push(apply_square(&s.l, &p.values)? - m * m);
    }
    require_equal(&mut hyp, &mut residuals, "variance_equality", variances[0], variances[1], tol);
    let Some(a) = resolve_k1(&mut hyp, f, s.c, s.outer, a)? else {
        return Ok(ChainReport::unmet(TheoremId::Mc1, mode, hyp, residuals, tol));
    };
    let gap1 = jensen_gap(f, &s.l, &s.g1.values)?;
    let gap2 = jensen_gap(f, &s.l, &s.g2.values)?;
    let values = vec![Named::new("gap1", gap1), Named::new("gap2", gap2)];
    Ok(two_sided(TheoremId::Mc1, mode, a, (gap1, variances[0]), (gap2, variances[1]), residuals, values, tol))
}

/// One level of a two-family chain: a functional applied to `g` and to `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    #[serde(rename = "L")]
    pub l: DiscreteFunctional,
    pub g: FunctionOnOmega,
    pub h: FunctionOnOmega,
}

impl Level {
    fn g_term(&self) -> Result<Term> {
        Term::new(self.l.clone(), self.g.clone())
    }

    fn h_term(&self) -> Result<Term> {
        Term::new(self.l.clone(), self.h.clone())
    }
}

/// Two nested chains sharing their functionals, the `g`-chain left of `c` and
/// the `h`-chain right of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mc2Scenario {
    pub outer: Interval,
    pub c: f64,
    pub levels: Vec<Level>,
    pub g_intervals: Vec<Interval>,
    pub h_intervals: Vec<Interval>,
}

/// Per link, the increment of `Lᵢ(f∘gᵢ)` is at most that of `Lᵢ(f∘hᵢ)`.
pub fn verify_mc2(f: &FunctionModel, a: Option<f64>, s: &Mc2Scenario, mode: Mode, tol: f64) -> Result<ChainReport> {
    let mode = normalize_mode(mode);
    require_outer_in_domain(f, s.outer)?;
    let n = s.levels.len();
    if n < 2 || s.g_intervals.len() != n - 1 || s.h_intervals.len() != n - 1 {
        return Err(Error::Structure(format!("{n} levels need {} nested intervals per family", n.saturating_sub(1))));
    }
    let g: Vec<Term> = s.levels.iter().map(Level::g_term).collect::<Result<_>>()?;
    let h: Vec<Term> = s.levels.iter().map(Level::h_term).collect::<Result<_>>()?;
    let mut hyp = ValidityReport::ok();
    let mut residuals = Vec::new();
    for (k, t) in g.iter().enumerate() {
        require_unital(&mut hyp, &format!("L{k}"), t.total(), tol);
    }
    if mode.is_literal() {
        let same = s.g_intervals == s.h_intervals;
        hyp.require(same, "shared_intervals", if same { 0.0 } else { 1.0 });
    }
    let gv: Vec<_> = g.iter().map(|t| &t.values).collect();
    let hv: Vec<_> = h.iter().map(|t| &t.values).collect();
    nesting(&mut hyp, "g.", &gv, &s.g_intervals, side_range(s.outer, s.c, Region::Left, mode), tol);
    nesting(&mut hyp, "h.", &hv, &s.h_intervals, side_range(s.outer, s.c, Region::Right, mode), tol);
    for k in 0..n - 1 {
        require_equal(&mut hyp, &mut residuals, &format!("mean_equality.g@{k}"), g[k].mean(), g[k + 1].mean(), tol);
        require_equal(&mut hyp, &mut residuals, &format!("mean_equality.h@{k}"), h[k].mean(), h[k + 1].mean(), tol);
        let dg = g[k + 1].square_moment() - g[k].square_moment();
        let dh = h[k + 1].square_moment() - h[k].square_moment();
        require_equal(&mut hyp, &mut residuals, &format!("square_moment_equality@{k}"), dg, dh, tol);
    }
    let Some(a) = resolve_k1(&mut hyp, f, s.c, s.outer, a)? else {
        return Ok(ChainReport::unmet(TheoremId::Mc2, mode, hyp, residuals, tol));
    };
    let fg = g.iter().map(|t| t.composed(f)).collect::<Result<Vec<_>>>()?;
    let fh = h.iter().map(|t| t.composed(f)).collect::<Result<Vec<_>>>()?;
    let mut margins = Vec::new();
    let mut values = Vec::new();
    let mut worst = f64::INFINITY;
    let mut scale = 1f64;
    for k in 0..n - 1 {
        let (dg, dh) = (fg[k + 1] - fg[k], fh[k + 1] - fh[k]);
        let sg = g[k + 1].square_moment() - g[k].square_moment();
        let sh = h[k + 1].square_moment() - h[k].square_moment();
        let chain = Chain::new(a, dg, sg, dh, sh);
        if !mode.is_literal() {
            margins.extend(chain.margins(false).into_iter().map(|m| Named::new(format!("{}@{k}", m.name), m.value)));
        }
        margins.push(Named::new(format!("link@{k}"), dh - dg));
        values.push(Named::new(format!("g_increment@{k}"), dg));
        values.push(Named::new(format!("h_increment@{k}"), dh));
        worst = worst.min(dh - dg);
        scale = scale.max(magnitude(&chain.values()));
    }
    let mut report = ChainReport::judged(TheoremId::Mc2, mode, residuals, None, Named::new("main", worst), margins, tol, scale)
        .with_a(Some(a))
        .with_values(values);
    if mode.is_literal() {
        report = report.note("literal reading: shared nested intervals, no side restriction");
    }
    Ok(report)
}

/// Subunital family applied to both `g` and `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mc3Scenario {
    pub outer: Interval,
    pub c: f64,
    pub terms: Vec<Level>,
}

/// Equal aggregate variances: the aggregate Jensen gap of the `g`-family is at
/// most that of the `h`-family. Both aggregates must lie in `I`.
pub fn verify_mc3(f: &FunctionModel, a: Option<f64>, s: &Mc3Scenario, mode: Mode, tol: f64) -> Result<ChainReport> {
    let mode = normalize_mode(mode);
    require_outer_in_domain(f, s.outer)?;
    if s.terms.is_empty() {
        return Err(Error::Structure("family needs at least one term".into()));
    }
    let g: Vec<Term> = s.terms.iter().map(Level::g_term).collect::<Result<_>>()?;
    let h: Vec<Term> = s.terms.iter().map(Level::h_term).collect::<Result<_>>()?;
    let mut hyp = ValidityReport::ok();
    let mut residuals = Vec::new();
    require_unital(&mut hyp, "family", family_total(&g), tol);
    let (gr, hr) = (side_range(s.outer, s.c, Region::Left, mode), side_range(s.outer, s.c, Region::Right, mode));
    for (i, (tg, th)) in g.iter().zip(&h).enumerate() {
        check_in(&mut hyp, &format!("g{i}"), &tg.values, gr, gr, RangeMode::Inside, tol);
        check_in(&mut hyp, &format!("h{i}"), &th.values, hr, hr, RangeMode::Inside, tol);
    }
    let (mg, mh) = (family_mean(&g), family_mean(&h));
    let vg = family_square(&g) - mg * mg;
    let vh = family_square(&h) - mh * mh;
    require_equal(&mut hyp, &mut residuals, "variance_equality", vg, vh, tol);
    let Some(a) = resolve_k1(&mut hyp, f, s.c, s.outer, a)? else {
        return Ok(ChainReport::unmet(TheoremId::Mc3, mode, hyp, residuals, tol));
    };
    let inside = |v: f64| (v - s.outer.lo()).min(s.outer.hi() - v);
    let clamp = |v: f64| v.clamp(s.outer.lo(), s.outer.hi());
    let gap_g = family_composed(f, &g)? - eval_fn(f, clamp(mg))?;
    let gap_h = family_composed(f, &h)? - eval_fn(f, clamp(mh))?;
    let chain = Chain::new(a, gap_g, vg, gap_h, vh);
    let mut margins = vec![Named::new("inclusion_g", inside(mg)), Named::new("inclusion_h", inside(mh))];
    if !mode.is_literal() {
        margins.extend(chain.margins(false));
    }
    let values = vec![Named::new("gap_g", gap_g), Named::new("gap_h", gap_h), Named::new("aggregate_g", mg), Named::new("aggregate_h", mh)];
    Ok(ChainReport::judged(TheoremId::Mc3, mode, residuals, Some(chain), Named::new("main", gap_h - gap_g), margins, tol, 1.0)
        .with_a(Some(a))
        .with_values(values)
        .note("inclusion checked for the pair (sum of L_i(g_i), sum of L_i(h_i))"))
}

/// An inside family and an outside family around one inner interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyPair {
    pub inner: Interval,
    pub inside: Vec<Term>,
    pub outside: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mt5Scenario {
    pub outer: Interval,
    pub c: f64,
    pub base: FamilyPair,
    pub starred: FamilyPair,
}

/// Four families: the difference `Σ H(f∘h) − Σ L(f∘g)` of the base pair is at
/// most that of the starred pair, given equal means within each pair and equal
/// square-moment differences across them.
pub fn verify_mt5(f: &FunctionModel, a: Option<f64>, s: &Mt5Scenario, mode: Mode, tol: f64) -> Result<ChainReport> {
    let mode = normalize_mode(mode);
    require_outer_in_domain(f, s.outer)?;
    for p in [&s.base, &s.starred] {
        if p.inside.is_empty() || p.outside.is_empty() {
            return Err(Error::Structure("every family needs at least one term".into()));
        }
    }
    let mut hyp = ValidityReport::ok();
    let mut residuals = Vec::new();
    shared_inner(&mut hyp, mode, s.base.inner, s.starred.inner);
    let mut sides = Vec::new();
    for (p, side, name) in [(&s.base, Region::Left, "base"), (&s.starred, Region::Right, "starred")] {
        let range = side_range(s.outer, s.c, side, mode);
        require_unital(&mut hyp, &format!("{name}.inside"), family_total(&p.inside), tol);
        require_unital(&mut hyp, &format!("{name}.outside"), family_total(&p.outside), tol);
        for (i, t) in p.inside.iter().enumerate() {
            check_in(&mut hyp, &format!("{name}.g{i}"), &t.values, p.inner, range, RangeMode::Inside, tol);
        }
        for (j, t) in p.outside.iter().enumerate() {
            check_in(&mut hyp, &format!("{name}.h{j}"), &t.values, p.inner, range, RangeMode::Outside, tol);
        }
        require_equal(&mut hyp, &mut residuals, &format!("mean_equality.{name}"), family_mean(&p.outside), family_mean(&p.inside), tol);
        sides.push(family_square(&p.outside) - family_square(&p.inside));
    }
    require_equal(&mut hyp, &mut residuals, "square_moment_equality", sides[0], sides[1], tol);
    let Some(a) = resolve_k1(&mut hyp, f, s.c, s.outer, a)? else {
        return Ok(ChainReport::unmet(TheoremId::Mt5, mode, hyp, residuals, tol));
    };
    let diff = family_composed(f, &s.base.outside)? - family_composed(f, &s.base.inside)?;
    let diff_star = family_composed(f, &s.starred.outside)? - family_composed(f, &s.starred.inside)?;
    let values = vec![Named::new("diff1", diff), Named::new("diff2", diff_star)];
    Ok(two_sided(TheoremId::Mt5, mode, a, (diff, sides[0]), (diff_star, sides[1]), residuals, values, tol)
        .note("starred inside terms composed as f(g*_i)"))
}
