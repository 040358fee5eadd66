//! Weighted affine combinations on the real line.
//!
//! An [`AffineConfig`] is three weighted point groups `a`, `b`, `c` read as
//! the signed combination `Σ αᵢ aᵢ + Σ βⱼ bⱼ − Σ γₖ cₖ`, subject to
//! `α + β − γ = 1`, `α, β ∈ (0, 1]` and every `cₖ` lying in the hull of the
//! two barycenters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::EPS_EQ;

/// Closed real interval `[lo, hi]`. Serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Structure("interval endpoint is NaN".into()));
        }
        if lo > hi {
            return Err(Error::Structure(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Closed membership with additive slack `tol`.
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    /// Strict interior membership.
    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn contains_interval(&self, other: &Interval, tol: f64) -> bool {
        other.lo >= self.lo - tol && other.hi <= self.hi + tol
    }

    /// Magnitude used to turn absolute tolerances into scaled ones.
    pub fn scale(&self) -> f64 {
        1f64.max(self.lo.abs()).max(self.hi.abs())
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// A constraint name paired with its measured value or residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Named {
    pub name: String,
    pub value: f64,
}

impl Named {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value }
    }
}

/// Outcome of a hypothesis check. `valid` is true iff `violations` is empty.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidityReport {
    valid: bool,
    violations: Vec<Named>,
}

impl ValidityReport {
    pub fn ok() -> Self {
        Self { valid: true, violations: Vec::new() }
    }

    pub fn from_violations(violations: Vec<Named>) -> Self {
        Self { valid: violations.is_empty(), violations }
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn violations(&self) -> &[Named] {
        &self.violations
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.violations.push(Named::new(name, value));
        self.valid = false;
    }

    /// Record a violation when `ok` is false.
    pub fn require(&mut self, ok: bool, name: impl Into<String>, value: f64) {
        if !ok {
            self.push(name, value);
        }
    }

    /// Append every violation of `other`, prefixing names with `prefix`.
    pub fn merge(&mut self, prefix: &str, other: ValidityReport) {
        for v in other.violations {
            let name = if prefix.is_empty() { v.name } else { format!("{prefix}.{}", v.name) };
            self.push(name, v.value);
        }
    }
}

/// Points with nonnegative weights.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawGroup")]
pub struct WeightedGroup {
    points: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGroup {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<RawGroup> for WeightedGroup {
    type Error = Error;

    fn try_from(raw: RawGroup) -> Result<Self> {
        WeightedGroup::new(raw.points, raw.weights)
    }
}

impl WeightedGroup {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::Structure(format!(
                "group has {} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(Error::Structure("group contains a non-finite value".into()));
        }
        if let Some(w) = weights.iter().find(|w| **w < 0.0) {
            return Err(Error::Structure(format!("negative weight {w}")));
        }
        Ok(Self { points, weights })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(point: f64, weight: f64) -> Result<Self> {
        Self::new(vec![point], vec![weight])
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Pairs whose weight is strictly positive.
    pub fn active(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().zip(&self.weights).filter(|(_, w)| **w > 0.0).map(|(p, w)| (*p, *w))
    }

    pub fn weighted_sum(&self) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * p).sum()
    }

    pub fn weighted_sum_of(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }

    /// Every point passed through `map`, weights kept.
    pub fn map_points(&self, map: impl Fn(f64) -> f64) -> Self {
        Self { points: self.points.iter().map(|p| map(*p)).collect(), weights: self.weights.clone() }
    }

    fn min_point(&self) -> Option<f64> {
        self.points.iter().copied().reduce(f64::min)
    }

    fn max_point(&self) -> Option<f64> {
        self.points.iter().copied().reduce(f64::max)
    }
}

/// Weighted mean of a group's points.
pub fn barycenter(g: &WeightedGroup) -> Result<f64> {
    let total = g.total_weight();
    if total <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    Ok(g.active().map(|(p, w)| (w / total) * p).sum())
}

/// Closed-hull test `min(a,b) − tol ≤ x ≤ max(a,b) + tol`.
pub fn hull_membership(x: f64, a: f64, b: f64, tol: f64) -> bool {
    x >= a.min(b) - tol && x <= a.max(b) + tol
}

/// Which hull the minus-group points are checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullReading {
    /// `cₖ ∈ conv{a, b}` with `a`, `b` the group barycenters.
    #[default]
    Barycenter,
    /// `cₖ ∈ conv{aᵢ, bⱼ}`, the hull of all plus points. Strictly wider.
    PointSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct AffineConfig {
    plus_a: WeightedGroup,
    plus_b: WeightedGroup,
    #[serde(default)]
    minus_c: WeightedGroup,
}

#[derive(Deserialize)]
struct RawConfig {
    plus_a: WeightedGroup,
    plus_b: WeightedGroup,
    #[serde(default)]
    minus_c: WeightedGroup,
}

impl TryFrom<RawConfig> for AffineConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        AffineConfig::new(raw.plus_a, raw.plus_b, raw.minus_c)
    }
}

impl AffineConfig {
    pub fn new(plus_a: WeightedGroup, plus_b: WeightedGroup, minus_c: WeightedGroup) -> Result<Self> {
        if plus_a.is_empty() || plus_b.is_empty() {
            return Err(Error::Structure("plus groups must be nonempty".into()));
        }
        Ok(Self { plus_a, plus_b, minus_c })
    }

    /// Shorthand for three single-point groups; a zero minus weight yields an empty minus group.
    pub fn from_singletons(a: (f64, f64), b: (f64, f64), c: Option<(f64, f64)>) -> Result<Self> {
        let minus = match c {
            Some((p, w)) => WeightedGroup::single(p, w)?,
            None => WeightedGroup::empty(),
        };
        Self::new(WeightedGroup::single(a.0, a.1)?, WeightedGroup::single(b.0, b.1)?, minus)
    }

    pub fn plus_a(&self) -> &WeightedGroup {
        &self.plus_a
    }

    pub fn plus_b(&self) -> &WeightedGroup {
        &self.plus_b
    }

    pub fn minus_c(&self) -> &WeightedGroup {
        &self.minus_c
    }

    pub fn alpha(&self) -> f64 {
        self.plus_a.total_weight()
    }

    pub fn beta(&self) -> f64 {
        self.plus_b.total_weight()
    }

    pub fn gamma(&self) -> f64 {
        self.minus_c.total_weight()
    }

    /// All points of the three groups.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        self.plus_a.points.iter().chain(&self.plus_b.points).chain(&self.minus_c.points).copied()
    }

    pub fn min_point(&self) -> f64 {
        self.points().fold(f64::INFINITY, f64::min)
    }

    pub fn max_point(&self) -> f64 {
        self.points().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ α g(a) + Σ β g(b) − Σ γ g(c)`.
    pub fn signed_sum(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.plus_a.weighted_sum_of(&g) + self.plus_b.weighted_sum_of(&g) - self.minus_c.weighted_sum_of(&g)
    }

    /// The signed combination without validating hypotheses.
    pub fn signed_mean(&self) -> f64 {
        self.signed_sum(|x| x)
    }

    /// Signed second moment minus the squared signed first moment.
    pub fn signed_spread(&self) -> f64 {
        let m1 = self.signed_mean();
        self.signed_sum(|x| x * x) - m1 * m1
    }

    /// Same weights, points passed through `map`.
    pub fn map_points(&self, map: impl Fn(f64) -> f64) -> Self {
        Self {
            plus_a: self.plus_a.map_points(&map),
            plus_b: self.plus_b.map_points(&map),
            minus_c: self.minus_c.map_points(&map),
        }
    }

    /// Barycenter hull `[min(a,b), max(a,b)]`.
    pub fn barycenter_hull(&self) -> Result<(f64, f64)> {
        let a = barycenter(&self.plus_a)?;
        let b = barycenter(&self.plus_b)?;
        Ok((a.min(b), a.max(b)))
    }

    fn hull(&self, reading: HullReading) -> Result<(f64, f64)> {
        match reading {
            HullReading::Barycenter => self.barycenter_hull(),
            HullReading::PointSet => {
                let lo = self.plus_a.min_point().zip(self.plus_b.min_point()).map(|(x, y)| x.min(y));
                let hi = self.plus_a.max_point().zip(self.plus_b.max_point()).map(|(x, y)| x.max(y));
                lo.zip(hi).ok_or_else(|| Error::Structure("plus groups must be nonempty".into()))
            }
        }
    }
}

/// Check every [`AffineConfig`] hypothesis under the barycenter hull reading.
pub fn validate_affine_config(cfg: &AffineConfig, tol: f64) -> ValidityReport {
    validate_affine_config_with(cfg, tol, HullReading::Barycenter)
}

pub fn validate_affine_config_with(cfg: &AffineConfig, tol: f64, reading: HullReading) -> ValidityReport {
    let mut report = ValidityReport::ok();
    let (alpha, beta, gamma) = (cfg.alpha(), cfg.beta(), cfg.gamma());
    report.require(alpha > 0.0 && alpha <= 1.0 + tol, "alpha_in_unit", alpha);
    report.require(beta > 0.0 && beta <= 1.0 + tol, "beta_in_unit", beta);
    report.require(gamma >= -tol, "gamma_nonnegative", gamma);
    let mass = alpha + beta - gamma - 1.0;
    report.require(mass.abs() <= tol, "unit_mass", mass);

    match cfg.hull(reading) {
        Ok((lo, hi)) => {
            let htol = tol * 1f64.max(lo.abs()).max(hi.abs());
            for (p, _) in cfg.minus_c.active() {
                if !hull_membership(p, lo, hi, htol) {
                    let excess = if p < lo { lo - p } else { p - hi };
                    report.push(format!("hull_membership@{p}"), excess);
                }
            }
        }
        Err(_) => report.push("plus_weight_positive", 0.0),
    }
    report
}

fn require_valid(cfg: &AffineConfig) -> Result<()> {
    let report = validate_affine_config(cfg, EPS_EQ);
    if report.is_valid() {
        Ok(())
    } else {
        let names: Vec<_> = report.violations().iter().map(|v| v.name.as_str()).collect();
        Err(Error::InvalidConfig(names.join(", ")))
    }
}

/// The signed combination `Σ αᵢ aᵢ + Σ βⱼ bⱼ − Σ γₖ cₖ` of a valid configuration.
pub fn combination_value(cfg: &AffineConfig) -> Result<f64> {
    require_valid(cfg)?;
    let v = cfg.signed_mean();
    let (lo, hi) = cfg.barycenter_hull()?;
    let tol = EPS_EQ * 1f64.max(lo.abs()).max(hi.abs());
    if !hull_membership(v, lo, hi, tol) {
        return Err(Error::InvalidConfig(format!("combination {v} escaped [{lo}, {hi}]")));
    }
    Ok(v)
}

/// Signed second moment minus squared signed first moment of a valid configuration.
pub fn spread(cfg: &AffineConfig) -> Result<f64> {
    require_valid(cfg)?;
    Ok(cfg.signed_spread())
}
