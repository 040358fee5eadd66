//! Jensen's inequality for affine combinations and its two-sided refinements
//! for functions that are 3-convex or 3-concave at a point.
//!
//! A scenario ([`Mt1Scenario`]) holds a left configuration with every point in
//! `I ∩ (−∞, c]` and a right configuration with every point in `I ∩ [c, ∞)`.
//! With `F = f − (A/2)x²` concave on the left and convex on the right, the
//! Jensen gaps of the two sides are bracketed by `(A/2)·spread`, which gives
//! the chain
//!
//! ```text
//! gap_left ≤ (A/2)·spread_left ≤ (A/2)·spread_right ≤ gap_right
//! ```
//!
//! and the reverse chain for the 3-concave case.

use serde::{Deserialize, Serialize};

use crate::analysis::{convex_on_grid, resolve_constant, three_convex_on_grid, ConstantResolution};
use crate::domain::{validate_affine_config, validate_affine_config_with, AffineConfig, HullReading, Interval, Named, ValidityReport};
use crate::error::{Error, Result};
use crate::funclib::{d2_one_sided, eval_fn, ClassKind, FunctionModel, Side};
use crate::report::{Branch, Chain, ChainReport, Mode, TheoremId};
use crate::{CHECK_GRID, DEFAULT_GRID};

/// `Σ α f(a) + Σ β f(b) − Σ γ f(c) − f(Σ α a + Σ β b − Σ γ c)`.
pub fn jensen_affine_gap(f: &FunctionModel, cfg: &AffineConfig) -> Result<f64> {
    let v = crate::domain::combination_value(cfg)?;
    raw_gap(f, cfg, v)
}

fn raw_gap(f: &FunctionModel, cfg: &AffineConfig, v: f64) -> Result<f64> {
    for p in cfg.points() {
        eval_fn(f, p)?;
    }
    let fv = eval_fn(f, v)?;
    Ok(cfg.signed_sum(|x| f.value(x)) - fv)
}

/// Jensen's inequality for an affine combination and a function convex on
/// the hull of its points.
pub fn verify_affine(f: &FunctionModel, cfg: &AffineConfig, reading: HullReading, tol: f64) -> Result<ChainReport> {
    let mut hyp = validate_affine_config_with(cfg, tol, reading);
    let hull = Interval::new(cfg.min_point(), cfg.max_point())?;
    if !f.domain().contains_interval(&hull, 0.0) {
        return Err(Error::OutOfDomain { x: hull.lo(), lo: f.domain().lo(), hi: f.domain().hi() });
    }
    let (convex, min) = convex_on_grid(f, hull, CHECK_GRID)?;
    hyp.require(convex, "f_convex", min);
    if !hyp.is_valid() {
        return Ok(ChainReport::unmet(TheoremId::Affine, Mode::Proper, hyp, vec![], tol));
    }
    let v = cfg.signed_mean();
    let lhs = eval_fn(f, v)?;
    let rhs = cfg.signed_sum(|x| f.value(x));
    let residuals = vec![Named::new("unit_mass", cfg.alpha() + cfg.beta() - cfg.gamma() - 1.0)];
    Ok(ChainReport::judged(TheoremId::Affine, Mode::Proper, residuals, None, Named::new("main", rhs - lhs), vec![], tol, lhs.abs().max(rhs.abs()))
        .with_values(vec![Named::new("lhs", lhs), Named::new("rhs", rhs), Named::new("combination", v)]))
}

/// Two affine configurations separated by `c` inside `interval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mt1Scenario {
    pub interval: Interval,
    pub c: f64,
    pub left: AffineConfig,
    pub right: AffineConfig,
}

impl Mt1Scenario {
    /// Largest left point.
    pub fn left_max(&self) -> f64 {
        self.left.max_point()
    }

    /// Smallest right point.
    pub fn right_min(&self) -> f64 {
        self.right.min_point()
    }

    /// Every point and `c` shifted by `t`.
    pub fn shifted(&self, t: f64) -> Result<Self> {
        Ok(Self {
            interval: Interval::new(self.interval.lo() + t, self.interval.hi() + t)?,
            c: self.c + t,
            left: self.left.map_points(|x| x + t),
            right: self.right.map_points(|x| x + t),
        })
    }

    /// The right configuration as the printed statement reads it: left
    /// weights attached to right points, group by group.
    pub fn literal_right(&self) -> Result<AffineConfig> {
        let pair = |l: &crate::domain::WeightedGroup, r: &crate::domain::WeightedGroup| {
            if l.len() != r.len() {
                return Err(Error::Structure(format!(
                    "literal weight reading needs equal group sizes, got {} and {}",
                    l.len(),
                    r.len()
                )));
            }
            crate::domain::WeightedGroup::new(r.points().to_vec(), l.weights().to_vec())
        };
        AffineConfig::new(
            pair(self.left.plus_a(), self.right.plus_a())?,
            pair(self.left.plus_b(), self.right.plus_b())?,
            pair(self.left.minus_c(), self.right.minus_c())?,
        )
    }
}

fn scaled(tol: f64, xs: &[f64]) -> f64 {
    tol * xs.iter().fold(1f64, |m, x| m.max(x.abs()))
}

fn placement(s: &Mt1Scenario, tol: f64, report: &mut ValidityReport) {
    let (lo, hi) = (s.interval.lo(), s.interval.hi());
    let ptol = scaled(tol, &[lo, hi]);
    report.require(s.interval.contains_interior(s.c), "c_interior", s.c);
    let excess = s
        .left
        .points()
        .chain(s.right.points())
        .map(|p| (lo - p).max(p - hi))
        .fold(f64::NEG_INFINITY, f64::max);
    report.require(excess <= ptol, "points_in_interval", excess);
}

/// Both configurations, separation by `c`, and equal spreads.
pub fn check_mt1_hypotheses(s: &Mt1Scenario, tol: f64) -> ValidityReport {
    check_mt1_full(s, tol).0
}

fn check_mt1_full(s: &Mt1Scenario, tol: f64) -> (ValidityReport, Vec<Named>) {
    let mut report = ValidityReport::ok();
    report.merge("left", validate_affine_config(&s.left, tol));
    report.merge("right", validate_affine_config(&s.right, tol));
    placement(s, tol, &mut report);
    let ctol = scaled(tol, &[s.c]);
    let sep_left = s.left_max() - s.c;
    let sep_right = s.c - s.right_min();
    report.require(sep_left <= ctol, "separation_left", sep_left);
    report.require(sep_right <= ctol, "separation_right", sep_right);
    let (sl, sr) = (s.left.signed_spread(), s.right.signed_spread());
    let diff = sl - sr;
    report.require(diff.abs() <= scaled(tol, &[sl, sr]), "spread_equality", diff);
    let residuals = vec![
        Named::new("spread_equality", diff),
        Named::new("separation_left", sep_left),
        Named::new("separation_right", sep_right),
    ];
    (report, residuals)
}

fn check_domain(f: &FunctionModel, s: &Mt1Scenario) -> Result<()> {
    if !f.domain().contains_interval(&s.interval, 0.0) {
        return Err(Error::OutOfDomain { x: s.interval.lo(), lo: f.domain().lo(), hi: f.domain().hi() });
    }
    Ok(())
}

fn side_gap(f: &FunctionModel, cfg: &AffineConfig) -> Result<f64> {
    raw_gap(f, cfg, cfg.signed_mean())
}

/// Two-sided refinement under matched spreads.
///
/// `a` is the constant of `f ∈ K1` at `s.c`; without it the catalog constant
/// or the classification witness is used. In literal mode the right gap and
/// spread use the left weights on the right points.
pub fn verify_mt1(f: &FunctionModel, a: Option<f64>, s: &Mt1Scenario, mode: Mode, tol: f64) -> Result<ChainReport> {
    check_domain(f, s)?;
    let (mut hyp, residuals) = check_mt1_full(s, tol);
    let right = if mode.is_literal() {
        match s.literal_right() {
            Ok(cfg) => Some(cfg),
            Err(_) => {
                hyp.push("literal_weight_shape", s.right.plus_a().len() as f64);
                None
            }
        }
    } else {
        Some(s.right.clone())
    };
    let a = if hyp.is_valid() {
        match resolve_constant(f, s.c, s.interval, ClassKind::K1, a, DEFAULT_GRID)? {
            ConstantResolution::Admissible(a) => Some(a),
            ConstantResolution::Rejected(v) => {
                hyp.push(v.name, v.value);
                None
            }
        }
    } else {
        None
    };
    let (Some(a), Some(right)) = (a, right) else {
        return Ok(ChainReport::unmet(TheoremId::Mt1, mode, hyp, residuals, tol));
    };

    let gap_left = side_gap(f, &s.left)?;
    let gap_right = side_gap(f, &right)?;
    let chain = Chain::new(a, gap_left, s.left.signed_spread(), gap_right, right.signed_spread());
    let main = Named::new("main", gap_right - gap_left);
    let mut report = ChainReport::judged(TheoremId::Mt1, mode, residuals, Some(chain), main, chain.margins(false), tol, 1.0)
        .with_a(Some(a))
        .with_values(vec![Named::new("gap_left", gap_left), Named::new("gap_right", gap_right)]);
    if mode.is_literal() {
        report = report.note("right side evaluated with the left weights");
    }
    Ok(report)
}

struct Ordered {
    hyp: ValidityReport,
    residuals: Vec<Named>,
    d2_minus: f64,
    d2_plus: f64,
    spread_left: f64,
    spread_right: f64,
}

fn check_ordered(f: &FunctionModel, s: &Mt1Scenario, tol: f64) -> Result<Ordered> {
    check_domain(f, s)?;
    let mut hyp = ValidityReport::ok();
    hyp.merge("left", validate_affine_config(&s.left, tol));
    hyp.merge("right", validate_affine_config(&s.right, tol));
    placement(s, tol, &mut hyp);
    let (am, rm) = (s.left_max(), s.right_min());
    let otol = scaled(tol, &[am, rm]);
    hyp.require(am <= rm + otol, "ordering", am - rm);
    let between = (am - s.c).max(s.c - rm);
    hyp.require(between <= otol, "c_between", between);
    let (sl, sr) = (s.left.signed_spread(), s.right.signed_spread());
    let residuals = vec![Named::new("ordering", am - rm), Named::new("spread_difference", sl - sr)];
    let d2_minus = d2_one_sided(f, am.max(s.interval.lo()), Side::Minus, None)?;
    let d2_plus = d2_one_sided(f, rm.min(s.interval.hi()), Side::Plus, None)?;
    Ok(Ordered { hyp, residuals, d2_minus, d2_plus, spread_left: sl, spread_right: sr })
}

fn pick_branch(requested: Branch, ok: [bool; 3]) -> std::result::Result<Branch, Named> {
    let names = [Branch::A, Branch::B, Branch::C];
    match requested {
        Branch::Auto => names
            .into_iter()
            .zip(ok)
            .find(|(_, ok)| *ok)
            .map(|(b, _)| b)
            .ok_or_else(|| Named::new("no_branch_applicable", 0.0)),
        b => {
            let i = names.iter().position(|n| *n == b).unwrap_or(0);
            if ok[i] {
                Ok(b)
            } else {
                Err(Named::new(format!("branch_{}", ["a", "b", "c"][i]), 0.0))
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn chain_report(
    theorem: TheoremId,
    mode: Mode,
    f: &FunctionModel,
    s: &Mt1Scenario,
    o: Ordered,
    a: f64,
    branch: Branch,
    descending: bool,
    tol: f64,
) -> Result<ChainReport> {
    let gap_left = side_gap(f, &s.left)?;
    let gap_right = side_gap(f, &s.right)?;
    let chain = Chain::new(a, gap_left, o.spread_left, gap_right, o.spread_right);
    let main = if descending { gap_left - gap_right } else { gap_right - gap_left };
    let mut residuals = o.residuals;
    residuals.push(Named::new("d2_minus", o.d2_minus));
    residuals.push(Named::new("d2_plus", o.d2_plus));
    Ok(ChainReport::judged(theorem, mode, residuals, Some(chain), Named::new("main", main), chain.margins(descending), tol, 1.0)
        .with_a(Some(a))
        .with_branch(Some(branch))
        .with_values(vec![Named::new("gap_left", gap_left), Named::new("gap_right", gap_right)]))
}

/// Refinement with one-sided second-derivative conditions at the innermost points.
///
/// Branch (a): `f″₋(ã) ≥ 0` and `spread_left ≤ spread_right`, with `A ≥ 0`.
/// Branch (b): `f″₊(r) ≤ 0` and `spread_left ≥ spread_right`, with `A ≤ 0`.
/// Branch (c): `f″₋(ã) < 0 < f″₊(r)` and `f` 3-convex, with `A = 0`.
pub fn verify_mt2(f: &FunctionModel, s: &Mt1Scenario, branch: Branch, tol: f64) -> Result<ChainReport> {
    let mut o = check_ordered(f, s, tol)?;
    let mode = Mode::Proper;
    if !o.hyp.is_valid() {
        return Ok(ChainReport::unmet(TheoremId::Mt2, mode, o.hyp, o.residuals, tol));
    }
    let stol = scaled(tol, &[o.spread_left, o.spread_right]);
    let (sl, sr) = (o.spread_left, o.spread_right);
    let ok_a = o.d2_minus >= 0.0 && sl <= sr + stol;
    let ok_b = o.d2_plus <= 0.0 && sl >= sr - stol;
    let needs_c = o.d2_minus < 0.0 && o.d2_plus > 0.0;
    let ok_c = needs_c && (matches!(branch, Branch::Auto | Branch::C) && three_convex_on_grid(f, s.interval, CHECK_GRID)?.0);
    let chosen = match pick_branch(branch, [ok_a, ok_b, ok_c]) {
        Ok(b) => b,
        Err(v) => {
            o.hyp.push(v.name, v.value);
            return Ok(ChainReport::unmet(TheoremId::Mt2, mode, o.hyp, o.residuals, tol));
        }
    };
    let a = match chosen {
        Branch::C => 0.0,
        _ => match resolve_constant(f, s.c, s.interval, ClassKind::K1, None, DEFAULT_GRID)? {
            ConstantResolution::Admissible(a) if chosen == Branch::A => a.max(0.0),
            ConstantResolution::Admissible(a) => a.min(0.0),
            ConstantResolution::Rejected(v) => {
                o.hyp.push(v.name, v.value);
                return Ok(ChainReport::unmet(TheoremId::Mt2, mode, o.hyp, o.residuals, tol));
            }
        },
    };
    chain_report(TheoremId::Mt2, mode, f, s, o, a, chosen, false, tol)
}

/// Reverse refinement for functions 3-concave at `c`.
///
/// `Mode::Proper` uses the conditions obtained by applying [`verify_mt2`] to
/// `−f`: (a) `f″₋(ã) ≤ 0`, `spread_left ≤ spread_right`; (b) `f″₊(r) ≥ 0`,
/// `spread_left ≥ spread_right`; (c) `f″₋(ã) > 0 > f″₊(r)`, `f` 3-concave.
/// `Mode::Literal` uses the conditions as printed: (a) `f″₋(ã) ≤ 0`,
/// `spread_left ≥ spread_right`; (b) `f″₊(r) ≥ 0`, `spread_left ≤ spread_right`;
/// (c) `f″₋(ã) < 0 < f″₊(r)`, `f` 3-concave.
pub fn verify_mt3(f: &FunctionModel, s: &Mt1Scenario, branch: Branch, mode: Mode, tol: f64) -> Result<ChainReport> {
    let mode = if mode.is_literal() { Mode::Literal } else { Mode::Proper };
    let mut o = check_ordered(f, s, tol)?;
    if !o.hyp.is_valid() {
        return Ok(ChainReport::unmet(TheoremId::Mt3, mode, o.hyp, o.residuals, tol));
    }
    let stol = scaled(tol, &[o.spread_left, o.spread_right]);
    let (sl, sr) = (o.spread_left, o.spread_right);
    let (left_le, left_ge) = (sl <= sr + stol, sl >= sr - stol);
    let (ok_a, ok_b, signs_c) = if mode.is_literal() {
        (o.d2_minus <= 0.0 && left_ge, o.d2_plus >= 0.0 && left_le, o.d2_minus < 0.0 && o.d2_plus > 0.0)
    } else {
        (o.d2_minus <= 0.0 && left_le, o.d2_plus >= 0.0 && left_ge, o.d2_minus > 0.0 && o.d2_plus < 0.0)
    };
    let ok_c = signs_c
        && matches!(branch, Branch::Auto | Branch::C)
        && three_convex_on_grid(&f.negated(), s.interval, CHECK_GRID)?.0;
    let chosen = match pick_branch(branch, [ok_a, ok_b, ok_c]) {
        Ok(b) => b,
        Err(v) => {
            o.hyp.push(v.name, v.value);
            return Ok(ChainReport::unmet(TheoremId::Mt3, mode, o.hyp, o.residuals, tol));
        }
    };
    let a = match chosen {
        Branch::C => 0.0,
        _ => match resolve_constant(f, s.c, s.interval, ClassKind::K2, None, DEFAULT_GRID)? {
            ConstantResolution::Admissible(a) if chosen == Branch::A => a.min(0.0),
            ConstantResolution::Admissible(a) => a.max(0.0),
            ConstantResolution::Rejected(v) => {
                o.hyp.push(v.name, v.value);
                return Ok(ChainReport::unmet(TheoremId::Mt3, mode, o.hyp, o.residuals, tol));
            }
        },
    };
    let (dm, dp) = (o.d2_minus, o.d2_plus);
    let conditions = if mode.is_literal() { "printed" } else { "mirrored" };
    Ok(chain_report(TheoremId::Mt3, mode, f, s, o, a, chosen, true, tol)?
        .note(format!("branch conditions: {conditions}"))
        .note(format!("d2_minus >= A >= d2_plus: {}", dm >= a && a >= dp))
        .note(format!("d2_minus <= A <= d2_plus: {}", dm <= a && a <= dp)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::WeightedGroup;
    use crate::report::Verdict;
    use crate::EPS_EQ;

    fn group(points: &[f64], weights: &[f64]) -> WeightedGroup {
        WeightedGroup::new(points.to_vec(), weights.to_vec()).unwrap()
    }

    fn convex(points: &[f64], weights: &[f64]) -> AffineConfig {
        let (p, w) = (points.len() / 2, weights.len() / 2);
        AffineConfig::new(group(&points[..p], &weights[..w]), group(&points[p..], &weights[w..]), WeightedGroup::empty())
            .unwrap()
    }

    fn mirrored() -> Mt1Scenario {
        Mt1Scenario {
            interval: Interval::new(-1.0, 1.0).unwrap(),
            c: 0.0,
            left: convex(&[-1.0, 0.0], &[0.5, 0.5]),
            right: convex(&[0.0, 1.0], &[0.5, 0.5]),
        }
    }

    #[test]
    fn gap_examples() {
        let cfg = AffineConfig::from_singletons((0.0, 0.6), (2.0, 0.6), Some((1.0, 0.2))).unwrap();
        let sq = FunctionModel::quadratic(2.0);
        assert!((jensen_affine_gap(&sq, &cfg).unwrap() - 1.2).abs() < 1e-12);
        assert!(jensen_affine_gap(&FunctionModel::affine(3.0, 1.0), &cfg).unwrap().abs() < 1e-12);
        let half = convex(&[0.0, 2.0], &[0.5, 0.5]);
        assert!((jensen_affine_gap(&sq, &half).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_verdicts() {
        let cfg = AffineConfig::from_singletons((0.0, 0.6), (2.0, 0.6), Some((1.0, 0.2))).unwrap();
        let r = verify_affine(&FunctionModel::quadratic(2.0), &cfg, HullReading::Barycenter, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!((r.margin.unwrap() - 1.2).abs() < 1e-12);
        let r = verify_affine(&FunctionModel::cubic().with_domain(Interval::new(-5.0, 5.0).unwrap()), &cfg.map_points(|x| x - 3.0), HullReading::Barycenter, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::HypothesesUnmet);
    }

    #[test]
    fn gap_rejects_invalid_config() {
        let bad = AffineConfig::from_singletons((0.0, 0.6), (2.0, 0.6), Some((5.0, 0.2))).unwrap();
        assert!(jensen_affine_gap(&FunctionModel::quadratic(2.0), &bad).is_err());
    }

    #[test]
    fn mirrored_hypotheses_hold() {
        let s = mirrored();
        assert!(check_mt1_hypotheses(&s, EPS_EQ).is_valid());
        assert_eq!(s.left.signed_spread(), 0.25);
        assert_eq!(s.right.signed_spread(), 0.25);
    }

    #[test]
    fn spread_mismatch_is_reported() {
        let mut s = mirrored();
        s.left = convex(&[-1.0, 0.0], &[0.5, 0.5]).map_points(|x| x * (1.2f64 / 0.25).sqrt());
        s.interval = Interval::new(-3.0, 1.0).unwrap();
        s.right = convex(&[0.0, 1.0], &[0.5, 0.5]).map_points(|x| x * (0.3f64 / 0.25).sqrt());
        let r = check_mt1_hypotheses(&s, EPS_EQ);
        let v = r.violations().iter().find(|v| v.name == "spread_equality").unwrap();
        assert!((v.value - 0.9).abs() < 1e-12);
    }

    #[test]
    fn separation_violation() {
        let mut s = mirrored();
        s.right = convex(&[-0.1, 1.0], &[0.5, 0.5]);
        let r = check_mt1_hypotheses(&s, EPS_EQ);
        assert!(r.violations().iter().any(|v| v.name == "separation_right"));
    }

    #[test]
    fn mt1_signed_square_chain() {
        let r = verify_mt1(&FunctionModel::signed_square(), Some(0.0), &mirrored(), Mode::Proper, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let c = r.chain.unwrap();
        assert_eq!(c.values(), [-0.25, 0.0, 0.0, 0.25]);
    }

    #[test]
    fn mt1_cubic_chain() {
        let r = verify_mt1(&FunctionModel::cubic(), Some(0.0), &mirrored(), Mode::Proper, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let c = r.chain.unwrap();
        assert!((c.gap_left + 0.375).abs() < 1e-12 && (c.gap_right - 0.375).abs() < 1e-12);
    }

    #[test]
    fn mt1_quadratic_is_tight() {
        let r = verify_mt1(&FunctionModel::quadratic(2.0), None, &mirrored(), Mode::Proper, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let c = r.chain.unwrap();
        assert!((c.gap_left - 0.25).abs() < 1e-12 && (c.gap_right - 0.25).abs() < 1e-12);
        assert!(r.margins.iter().all(|m| m.value.abs() < 1e-12));
    }

    #[test]
    fn mt1_rejects_inadmissible_constant() {
        let r = verify_mt1(&FunctionModel::signed_square(), Some(3.0), &mirrored(), Mode::Proper, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::HypothesesUnmet);
    }

    fn exp_scenario() -> Mt1Scenario {
        Mt1Scenario {
            interval: Interval::new(-1.0, 1.0).unwrap(),
            c: 0.0,
            left: convex(&[-0.4, -0.2], &[0.5, 0.5]),
            right: convex(&[0.2, 0.6], &[0.5, 0.5]),
        }
    }

    #[test]
    fn mt2_exp_branch_a() {
        let s = exp_scenario();
        assert!((s.left.signed_spread() - 0.01).abs() < 1e-12);
        assert!((s.right.signed_spread() - 0.04).abs() < 1e-12);
        let r = verify_mt2(&FunctionModel::exp(), &s, Branch::Auto, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.branch, Some(Branch::A));
        assert_eq!(r.constant_a, Some(1.0));
    }

    #[test]
    fn mt2_signed_square_branch_c() {
        let r = verify_mt2(&FunctionModel::signed_square(), &mirrored(), Branch::Auto, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.branch, Some(Branch::C));
        assert_eq!(r.chain.unwrap().values(), [-0.25, 0.0, 0.0, 0.25]);
    }

    #[test]
    fn mt2_requested_branch_unmet() {
        let r = verify_mt2(&FunctionModel::signed_square(), &mirrored(), Branch::A, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::HypothesesUnmet);
    }

    #[test]
    fn mt3_negated_signed_square() {
        let f = FunctionModel::signed_square().negated();
        let r = verify_mt3(&f, &mirrored(), Branch::Auto, Mode::Proper, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.branch, Some(Branch::C));
        assert_eq!(r.chain.unwrap().values(), [0.25, 0.0, 0.0, -0.25]);
        let printed = verify_mt3(&f, &mirrored(), Branch::Auto, Mode::Literal, EPS_EQ).unwrap();
        assert_eq!(printed.verdict, Verdict::HypothesesUnmet);
    }

    #[test]
    fn mt3_quadratic_tight() {
        let r = verify_mt3(&FunctionModel::quadratic(2.0), &mirrored(), Branch::Auto, Mode::Proper, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.margins.iter().all(|m| m.value.abs() < 1e-12));
    }

    #[test]
    fn mt3_signed_square_unmet() {
        let r = verify_mt3(&FunctionModel::signed_square(), &mirrored(), Branch::Auto, Mode::Proper, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::HypothesesUnmet);
    }

    #[test]
    fn mt3_printed_branch_a_admits_a_violation() {
        // f = −x² lies in K2 at every c with A = −2; spread_left > spread_right.
        let f = FunctionModel::quadratic(-2.0);
        let s = Mt1Scenario {
            interval: Interval::new(-3.0, 1.0).unwrap(),
            c: 0.0,
            left: convex(&[-2.0, 0.0], &[0.5, 0.5]),
            right: convex(&[0.0, 1.0], &[0.5, 0.5]),
        };
        let printed = verify_mt3(&f, &s, Branch::A, Mode::Literal, EPS_EQ).unwrap();
        assert_eq!(printed.verdict, Verdict::Fails);
        let mirrored = verify_mt3(&f, &s, Branch::Auto, Mode::Proper, EPS_EQ).unwrap();
        assert_eq!(mirrored.verdict, Verdict::HypothesesUnmet);
    }

    #[test]
    fn mt1_literal_weights_need_equal_shapes() {
        let mut s = mirrored();
        s.right = AffineConfig::new(group(&[0.0, 0.5], &[0.25, 0.25]), group(&[1.0], &[0.5]), WeightedGroup::empty()).unwrap();
        let r = verify_mt1(&FunctionModel::signed_square(), Some(0.0), &s, Mode::Literal, EPS_EQ).unwrap();
        assert_eq!(r.verdict, Verdict::HypothesesUnmet);
    }
}
