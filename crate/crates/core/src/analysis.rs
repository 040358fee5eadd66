//! Divided differences, the feasible interval for the constant `A`, and
//! classification of a function as 3-convex or 3-concave at a point.
//!
//! `f` is 3-convex at `c` on `I` (class `K1`) when some `A` makes
//! `f(x) − (A/2)x²` concave on `I ∩ (−∞, c]` and convex on `I ∩ [c, ∞)`.
//! Since concavity/convexity of that difference is the sign of its second
//! divided differences, the admissible `A` are sandwiched between
//! `sup dd2` over the left side and `inf dd2` over the right side, where
//! [`dd2`] is normalised so that it tends to `f″` as the nodes coalesce.

use serde::{Deserialize, Serialize};

use crate::domain::{Interval, Named};
use crate::error::{Error, Result};
use crate::funclib::{ClassKind, FunctionModel};
use crate::EPS_EQ;

/// Classical divided difference `f[x₀, …, x_k]` by the recursive table.
pub fn divided_difference(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::Structure("divided difference needs matching, nonempty node and value lists".into()));
    }
    let mut table = ys.to_vec();
    for order in 1..xs.len() {
        for i in 0..xs.len() - order {
            let dx = xs[i + order] - xs[i];
            if dx == 0.0 {
                return Err(Error::CoincidentNodes);
            }
            table[i] = (table[i + 1] - table[i]) / dx;
        }
    }
    Ok(table[0])
}

#[inline]
fn bracket2(x: [f64; 3], y: [f64; 3]) -> f64 {
    let right = (y[2] - y[1]) / (x[2] - x[1]);
    let left = (y[1] - y[0]) / (x[1] - x[0]);
    2.0 * (right - left) / (x[2] - x[0])
}

fn sorted_values<const N: usize>(f: &FunctionModel, mut xs: [f64; N]) -> Result<([f64; N], [f64; N])> {
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::CoincidentNodes);
    }
    let mut ys = [0.0; N];
    for (y, x) in ys.iter_mut().zip(&xs) {
        *y = crate::funclib::eval_fn(f, *x)?;
    }
    Ok((xs, ys))
}

/// Twice the classical second divided difference, so that it converges to `f″`.
/// Nodes are sorted first, which makes the result exactly permutation invariant.
pub fn dd2(f: &FunctionModel, x1: f64, x2: f64, x3: f64) -> Result<f64> {
    let (xs, ys) = sorted_values(f, [x1, x2, x3])?;
    Ok(bracket2(xs, ys))
}

/// Classical third divided difference.
pub fn dd3(f: &FunctionModel, x1: f64, x2: f64, x3: f64, x4: f64) -> Result<f64> {
    let (xs, ys) = sorted_values(f, [x1, x2, x3, x4])?;
    divided_difference(&xs, &ys)
}

/// Feasible range for `A` at a grid resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AInterval {
    /// Largest left-side bracket.
    pub lo: f64,
    /// Smallest right-side bracket.
    pub hi: f64,
    pub feasible: bool,
    /// Slack used for `feasible`: `EPS_EQ` scaled, plus the rounding floor of the brackets.
    pub tolerance: f64,
    pub spacing_left: f64,
    pub spacing_right: f64,
    /// A non-finite bracket was skipped.
    pub clamped: bool,
}

impl AInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, a: f64) -> bool {
        a >= self.lo - self.tolerance && a <= self.hi + self.tolerance
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn negated(&self) -> Self {
        Self { lo: -self.hi, hi: -self.lo, ..*self }
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / n as f64;
    (0..=n).map(|i| if i == n { hi } else { lo + step * i as f64 }).collect()
}

struct SideScan {
    extreme: f64,
    noise: f64,
    spacing: f64,
    clamped: bool,
}

fn scan_side(f: &FunctionModel, lo: f64, hi: f64, n: usize, take_max: bool) -> SideScan {
    let xs = grid(lo, hi, n);
    let ys: Vec<f64> = xs.iter().map(|x| f.value(*x)).collect();
    let spacing = (hi - lo) / n as f64;
    let mut extreme = if take_max { f64::NEG_INFINITY } else { f64::INFINITY };
    let mut clamped = false;
    let mut fmax = 0f64;
    for i in 0..xs.len() - 2 {
        let v = bracket2([xs[i], xs[i + 1], xs[i + 2]], [ys[i], ys[i + 1], ys[i + 2]]);
        if !v.is_finite() {
            clamped = true;
            continue;
        }
        fmax = fmax.max(ys[i].abs()).max(ys[i + 1].abs()).max(ys[i + 2].abs());
        extreme = if take_max { extreme.max(v) } else { extreme.min(v) };
    }
    let noise = 8.0 * f64::EPSILON * fmax / (spacing * spacing);
    SideScan { extreme, noise, spacing, clamped }
}

/// `[sup left dd2, inf right dd2]` over consecutive triples of a uniform grid
/// with `grid_n` subintervals on each side of `c`.
pub fn feasible_a_interval(f: &FunctionModel, c: f64, interval: Interval, grid_n: usize) -> Result<AInterval> {
    if !interval.contains_interior(c) {
        return Err(Error::Precondition(format!("c = {c} is not interior to [{}, {}]", interval.lo(), interval.hi())));
    }
    if grid_n < 3 {
        return Err(Error::DegenerateGrid(format!("grid_n = {grid_n} gives fewer than 3 windows per side")));
    }
    if !f.domain().contains_interval(&interval, 0.0) {
        return Err(Error::OutOfDomain { x: interval.lo(), lo: f.domain().lo(), hi: f.domain().hi() });
    }
    let left = scan_side(f, interval.lo(), c, grid_n, true);
    let right = scan_side(f, c, interval.hi(), grid_n, false);
    if !left.extreme.is_finite() || !right.extreme.is_finite() {
        return Err(Error::DegenerateGrid("no finite bracket on one side".into()));
    }
    let (lo, hi) = (left.extreme, right.extreme);
    let tolerance = EPS_EQ * 1f64.max(lo.abs()).max(hi.abs()) + left.noise + right.noise;
    Ok(AInterval {
        lo,
        hi,
        feasible: lo <= hi + tolerance,
        tolerance,
        spacing_left: left.spacing,
        spacing_right: right.spacing,
        clamped: left.clamped || right.clamped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    K1,
    K2,
    Both,
    Neither,
}

impl PointClass {
    pub fn includes(self, kind: ClassKind) -> bool {
        matches!(
            (self, kind),
            (PointClass::Both, _) | (PointClass::K1, ClassKind::K1) | (PointClass::K2, ClassKind::K2)
        )
    }

    pub fn is_k1(self) -> bool {
        matches!(self, PointClass::K1 | PointClass::Both)
    }

    pub fn is_k2(self) -> bool {
        matches!(self, PointClass::K2 | PointClass::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityClass {
    pub class: PointClass,
    pub witness_a: Option<f64>,
    pub point: f64,
    /// Admissible `A` for 3-convexity.
    pub k1: AInterval,
    /// Admissible `A` for 3-concavity, in the sign convention of `f`.
    pub k2: AInterval,
}

/// Classify `f` at `c`: `K1` iff the feasible interval of `f` is nonempty,
/// `K2` iff that of `−f` is. The witness is the midpoint of the feasible
/// interval (of the intersection when both classes hold and they overlap).
pub fn classify_at_point(f: &FunctionModel, c: f64, interval: Interval, grid_n: usize) -> Result<ConvexityClass> {
    let k1 = feasible_a_interval(f, c, interval, grid_n)?;
    let k2 = feasible_a_interval(&f.negated(), c, interval, grid_n)?.negated();
    let (class, witness_a) = match (k1.feasible, k2.feasible) {
        (true, true) => {
            let lo = k1.lo.max(k2.lo);
            let hi = k1.hi.min(k2.hi);
            let w = if lo <= hi + k1.tolerance.max(k2.tolerance) { 0.5 * (lo + hi) } else { k1.midpoint() };
            (PointClass::Both, Some(w))
        }
        (true, false) => (PointClass::K1, Some(k1.midpoint())),
        (false, true) => (PointClass::K2, Some(k2.midpoint())),
        (false, false) => (PointClass::Neither, None),
    };
    Ok(ConvexityClass { class, witness_a, point: c, k1, k2 })
}

/// Smallest bracket over consecutive triples of an `n`-subinterval grid on `interval`,
/// and whether it clears the rounding floor (`f` convex at grid resolution).
pub fn convex_on_grid(f: &FunctionModel, interval: Interval, n: usize) -> Result<(bool, f64)> {
    if n < 2 {
        return Err(Error::DegenerateGrid(format!("n = {n}")));
    }
    if interval.width() == 0.0 {
        return Ok((true, 0.0));
    }
    let scan = scan_side(f, interval.lo(), interval.hi(), n, false);
    let tol = EPS_EQ * 1f64.max(scan.extreme.abs()) + scan.noise;
    Ok((scan.extreme >= -tol, scan.extreme))
}

/// Smallest third divided difference over consecutive quadruples of an
/// `n`-subinterval grid, and whether it clears the rounding floor (3-convex).
pub fn three_convex_on_grid(f: &FunctionModel, interval: Interval, n: usize) -> Result<(bool, f64)> {
    if n < 3 {
        return Err(Error::DegenerateGrid(format!("n = {n}")));
    }
    if interval.width() == 0.0 {
        return Ok((true, 0.0));
    }
    let xs = grid(interval.lo(), interval.hi(), n);
    let ys: Vec<f64> = xs.iter().map(|x| f.value(*x)).collect();
    let h = interval.width() / n as f64;
    let fmax = ys.iter().fold(0f64, |m, y| m.max(y.abs()));
    let mut min = f64::INFINITY;
    for i in 0..xs.len() - 3 {
        min = min.min(divided_difference(&xs[i..i + 4], &ys[i..i + 4])?);
    }
    let tol = EPS_EQ + 16.0 * f64::EPSILON * fmax / (h * h * h);
    Ok((min >= -tol, min))
}

/// Outcome of settling the constant `A` for a class at `c`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstantResolution {
    Admissible(f64),
    /// The named hypothesis failed; the value measures by how much.
    Rejected(Named),
}

/// Settle `A` for `f ∈ kind` at `c` on `interval`.
///
/// A supplied constant is checked against the grid's feasible interval.
/// Otherwise the closed-form catalog constant is used when the model has one,
/// falling back to the witness of [`classify_at_point`].
pub fn resolve_constant(
    f: &FunctionModel,
    c: f64,
    interval: Interval,
    kind: ClassKind,
    supplied: Option<f64>,
    grid_n: usize,
) -> Result<ConstantResolution> {
    let feasible = |f: &FunctionModel| -> Result<AInterval> {
        match kind {
            ClassKind::K2 => Ok(feasible_a_interval(&f.negated(), c, interval, grid_n)?.negated()),
            _ => feasible_a_interval(f, c, interval, grid_n),
        }
    };
    let tag = match kind {
        ClassKind::K2 => "k2_at_c",
        _ => "k1_at_c",
    };
    if let Some(a) = supplied {
        let range = feasible(f)?;
        if !range.feasible {
            return Ok(ConstantResolution::Rejected(Named::new(tag, range.lo - range.hi)));
        }
        if range.contains(a) {
            return Ok(ConstantResolution::Admissible(a));
        }
        let miss = if a < range.lo { range.lo - a } else { a - range.hi };
        return Ok(ConstantResolution::Rejected(Named::new("constant_a_admissible", miss)));
    }
    if let Some(known) = f.known_class(c) {
        let ok = match kind {
            ClassKind::K2 => known.class.includes_k2(),
            _ => known.class.includes_k1(),
        };
        if ok {
            return Ok(ConstantResolution::Admissible(known.a));
        }
    }
    let range = feasible(f)?;
    if range.feasible {
        Ok(ConstantResolution::Admissible(range.midpoint()))
    } else {
        Ok(ConstantResolution::Rejected(Named::new(tag, range.lo - range.hi)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funclib::{FunctionModel, TabulatedFunction};

    fn unit() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn dd2_examples() {
        let sq = FunctionModel::quadratic(2.0);
        assert!((dd2(&sq, -0.3, 0.9, 0.1).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(dd2(&FunctionModel::cubic(), 0.0, 1.0, 2.0).unwrap(), 6.0);
        assert_eq!(dd2(&FunctionModel::affine(0.0, 4.0), 0.0, 0.5, 3.0).unwrap(), 0.0);
        assert_eq!(dd2(&sq, 1.0, 1.0, 2.0), Err(Error::CoincidentNodes));
    }

    #[test]
    fn dd3_examples() {
        let c = FunctionModel::cubic();
        assert!((dd3(&c, -1.0, 0.3, 0.5, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(dd3(&FunctionModel::quadratic(2.0), 0.0, 1.0, 2.0, 5.0).unwrap().abs() < 1e-12);
        // x|x| at (−1,−½,½,1): second DDs are −1 and 1 on the outer triples
        let v = dd3(&FunctionModel::signed_square(), -1.0, -0.5, 0.5, 1.0).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12, "{v}");
        assert_eq!(dd3(&c, 0.0, 1.0, 1.0, 2.0), Err(Error::CoincidentNodes));
    }

    #[test]
    fn interval_for_cubic_brackets_six_c() {
        let f = FunctionModel::cubic();
        let a = feasible_a_interval(&f, 0.0, unit(), 1000).unwrap();
        assert!(a.contains(0.0));
        assert!(a.width() <= 12.0 * 1e-3 + EPS_EQ, "{a:?}");
    }

    #[test]
    fn interval_for_signed_square() {
        let a = feasible_a_interval(&FunctionModel::signed_square(), 0.0, unit(), 1000).unwrap();
        assert!((a.lo + 2.0).abs() < 1e-6 && (a.hi - 2.0).abs() < 1e-6, "{a:?}");
    }

    #[test]
    fn interval_for_quadratic_is_a_point() {
        let a = feasible_a_interval(&FunctionModel::quadratic(3.0), 0.4, unit(), 500).unwrap();
        assert!(a.feasible);
        assert!((a.lo - 3.0).abs() < 1e-7 && (a.hi - 3.0).abs() < 1e-7, "{a:?}");
    }

    #[test]
    fn interval_errors() {
        let f = FunctionModel::cubic();
        assert!(matches!(feasible_a_interval(&f, 0.0, unit(), 2), Err(Error::DegenerateGrid(_))));
        assert!(matches!(feasible_a_interval(&f, 1.0, unit(), 10), Err(Error::Precondition(_))));
    }

    #[test]
    fn classify_examples() {
        let c = classify_at_point(&FunctionModel::signed_square(), 0.0, unit(), 1000).unwrap();
        assert_eq!(c.class, PointClass::K1);
        assert!(c.witness_a.unwrap().abs() < 1e-9);

        let c = classify_at_point(&FunctionModel::quadratic(2.0), 0.5, unit(), 1000).unwrap();
        assert_eq!(c.class, PointClass::Both);
        assert!((c.witness_a.unwrap() - 2.0).abs() < 1e-7);

        let table = TabulatedFunction::sample(|x| x.powi(4), -1.0, 1.0, 401).unwrap();
        let c = classify_at_point(&FunctionModel::tabulated(table), 0.0, unit(), 200).unwrap();
        assert!(!c.k1.feasible);
        assert_eq!(c.class, PointClass::Neither);
        assert!(c.witness_a.is_none());

        let c = classify_at_point(&FunctionModel::signed_square().negated(), 0.0, unit(), 400).unwrap();
        assert_eq!(c.class, PointClass::K2);
    }

    #[test]
    fn grid_convexity_checks() {
        let (ok, _) = convex_on_grid(&FunctionModel::exp(), unit(), 200).unwrap();
        assert!(ok);
        let (ok, min) = convex_on_grid(&FunctionModel::signed_square(), unit(), 200).unwrap();
        assert!(!ok && min < -1.0);
        assert!(three_convex_on_grid(&FunctionModel::signed_square(), unit(), 200).unwrap().0);
        assert!(three_convex_on_grid(&FunctionModel::cubic(), unit(), 200).unwrap().0);
        assert!(!three_convex_on_grid(&FunctionModel::signed_square().negated(), unit(), 200).unwrap().0);
    }
}
