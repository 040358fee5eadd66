//! Function models: evaluation, one-sided second derivatives and a small
//! catalog of functions whose 3-convexity structure is known in closed form.
//!
//! Models are built from a compact text spec, `name[:params]`:
//!
//! | spec                 | f(x)                      |
//! |----------------------|---------------------------|
//! | `quadratic:q`        | q·x²/2                    |
//! | `cubic`              | x³                        |
//! | `signed_square`      | x·\|x\|                   |
//! | `exp`                | eˣ                        |
//! | `quartic`            | x⁴                        |
//! | `affine:k,t`         | k·x + t                   |
//! | `tabulated:<path>`   | table file, see [`TabulatedFunction`] |
//! | `neg:<spec>`         | −g(x)                     |
//! | `shift:<t>:<spec>`   | g(x − t)                  |

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::Interval;
use crate::error::{Error, Result};

const POLY_DOMAIN: f64 = 1e3;
const EXP_DOMAIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Minus,
    Plus,
}

/// Membership in `K1c` (3-convex at c), `K2c` (3-concave at c) or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassKind {
    K1,
    K2,
    Both,
}

impl ClassKind {
    pub fn includes_k1(self) -> bool {
        matches!(self, ClassKind::K1 | ClassKind::Both)
    }

    pub fn includes_k2(self) -> bool {
        matches!(self, ClassKind::K2 | ClassKind::Both)
    }

    fn flipped(self) -> Self {
        match self {
            ClassKind::K1 => ClassKind::K2,
            ClassKind::K2 => ClassKind::K1,
            ClassKind::Both => ClassKind::Both,
        }
    }
}

/// Closed-form class metadata: `f ∈ class` at `c` with constant `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnownClass {
    pub c: f64,
    pub a: f64,
    pub class: ClassKind,
}

/// A function sampled at strictly increasing nodes, evaluated by quadratic
/// interpolation through the three nodes nearest to `x`.
///
/// The interpolant is piecewise quadratic and may jump where the nearest
/// triple changes; at the nodes it reproduces the table exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::Structure("table node/value lengths differ".into()));
        }
        if nodes.len() < 2 {
            return Err(Error::Structure("table needs at least two nodes".into()));
        }
        if nodes.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::Structure("table contains a non-finite value".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Structure("table nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, values })
    }

    /// Sample `f` at `n` uniform nodes on `[lo, hi]`.
    pub fn sample(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Structure("table needs at least two nodes".into()));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect();
        let values = nodes.iter().map(|x| f(*x)).collect();
        Self::new(nodes, values)
    }

    /// Parse two numeric columns (node, value) separated by whitespace or commas.
    /// Text after `#` is a comment; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(|ch: char| ch == ',' || ch.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if cols.len() != 2 {
                return Err(Error::TableParse { line: line_no, reason: format!("expected 2 columns, found {}", cols.len()) });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::TableParse { line: line_no, reason: format!("`{s}`: {e}") })
            };
            let (x, y) = (parse(cols[0])?, parse(cols[1])?);
            if let Some(prev) = nodes.last() {
                if x <= *prev {
                    return Err(Error::TableParse { line: line_no, reason: format!("node {x} does not increase past {prev}") });
                }
            }
            nodes.push(x);
            values.push(y);
        }
        Self::new(nodes, values).map_err(|e| Error::TableParse { line: 0, reason: e.to_string() })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::TableParse { line: 0, reason: format!("{}: {e}", path.as_ref().display()) })?;
        Self::parse(&text)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> Interval {
        Interval::new(self.nodes[0], *self.nodes.last().unwrap()).expect("increasing nodes")
    }

    fn window(&self, x: f64) -> (usize, usize) {
        let n = self.nodes.len();
        let width = n.min(3);
        let j = self.nodes.partition_point(|node| *node < x);
        // [lo, hi) grows toward whichever neighbour is nearer
        let (mut lo, mut hi) = (j, j);
        while hi - lo < width {
            let left = if lo > 0 { Some(x - self.nodes[lo - 1]) } else { None };
            let right = if hi < n { Some(self.nodes[hi] - x) } else { None };
            match (left, right) {
                (Some(l), Some(r)) if r < l => hi += 1,
                (Some(_), _) => lo -= 1,
                (None, _) => hi += 1,
            }
        }
        (lo, hi)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let xs = &self.nodes[lo..hi];
        let ys = &self.values[lo..hi];
        // Lagrange form through the window nodes
        (0..xs.len())
            .map(|i| {
                let basis: f64 = (0..xs.len()).filter(|&k| k != i).map(|k| (x - xs[k]) / (xs[i] - xs[k])).product();
                ys[i] * basis
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    /// q·x²/2
    Quadratic { q: f64 },
    Cubic,
    SignedSquare,
    Exp,
    Quartic,
    Affine { slope: f64, intercept: f64 },
    Tabulated(TabulatedFunction),
    Neg(Box<FunctionKind>),
    /// x ↦ inner(x − by)
    Shift { by: f64, inner: Box<FunctionKind> },
}

impl FunctionKind {
    fn eval(&self, x: f64) -> f64 {
        match self {
            FunctionKind::Quadratic { q } => 0.5 * q * x * x,
            FunctionKind::Cubic => x * x * x,
            FunctionKind::SignedSquare => x * x.abs(),
            FunctionKind::Exp => x.exp(),
            FunctionKind::Quartic => (x * x) * (x * x),
            FunctionKind::Affine { slope, intercept } => slope * x + intercept,
            FunctionKind::Tabulated(t) => t.eval(x),
            FunctionKind::Neg(inner) => -inner.eval(x),
            FunctionKind::Shift { by, inner } => inner.eval(x - by),
        }
    }

    fn d2(&self, x: f64, side: Side) -> Option<f64> {
        Some(match self {
            FunctionKind::Quadratic { q } => *q,
            FunctionKind::Cubic => 6.0 * x,
            FunctionKind::SignedSquare => {
                let negative = match side {
                    Side::Minus => x <= 0.0,
                    Side::Plus => x < 0.0,
                };
                if negative {
                    -2.0
                } else {
                    2.0
                }
            }
            FunctionKind::Exp => x.exp(),
            FunctionKind::Quartic => 12.0 * x * x,
            FunctionKind::Affine { .. } => 0.0,
            FunctionKind::Tabulated(_) => return None,
            FunctionKind::Neg(inner) => -inner.d2(x, side)?,
            FunctionKind::Shift { by, inner } => inner.d2(x - by, side)?,
        })
    }

    fn known_class(&self, c: f64) -> Option<KnownClass> {
        let (a, class) = match self {
            FunctionKind::Quadratic { q } => (*q, ClassKind::Both),
            FunctionKind::Cubic => (6.0 * c, ClassKind::K1),
            // any A in [f″₋(c), f″₊(c)] works; pick 0 at the kink
            FunctionKind::SignedSquare => (if c == 0.0 { 0.0 } else { 2.0 * c.signum() }, ClassKind::K1),
            FunctionKind::Exp => (c.exp(), ClassKind::K1),
            FunctionKind::Affine { .. } => (0.0, ClassKind::Both),
            FunctionKind::Quartic | FunctionKind::Tabulated(_) => return None,
            FunctionKind::Neg(inner) => {
                let k = inner.known_class(c)?;
                (-k.a, k.class.flipped())
            }
            FunctionKind::Shift { by, inner } => {
                let k = inner.known_class(c - by)?;
                (k.a, k.class)
            }
        };
        Some(KnownClass { c, a, class })
    }

    /// True when f″ is nondecreasing on the whole line (3-convex on every interval).
    fn globally_three_convex(&self) -> Option<bool> {
        match self {
            FunctionKind::Quadratic { .. } | FunctionKind::Affine { .. } => Some(true),
            FunctionKind::Cubic | FunctionKind::SignedSquare | FunctionKind::Exp => Some(true),
            FunctionKind::Quartic | FunctionKind::Tabulated(_) => None,
            FunctionKind::Neg(inner) => match inner.as_ref() {
                FunctionKind::Quadratic { .. } | FunctionKind::Affine { .. } => Some(true),
                other => other.globally_three_convex().map(|_| false),
            },
            FunctionKind::Shift { inner, .. } => inner.globally_three_convex(),
        }
    }

    fn default_domain(&self) -> Interval {
        match self {
            FunctionKind::Exp => Interval::new(-EXP_DOMAIN, EXP_DOMAIN).unwrap(),
            FunctionKind::Tabulated(t) => t.domain(),
            FunctionKind::Neg(inner) => inner.default_domain(),
            FunctionKind::Shift { by, inner } => {
                let d = inner.default_domain();
                Interval::new(d.lo() + by, d.hi() + by).unwrap()
            }
            _ => Interval::new(-POLY_DOMAIN, POLY_DOMAIN).unwrap(),
        }
    }
}

/// An evaluable real function on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionModel {
    id: String,
    kind: FunctionKind,
    domain: Interval,
}

impl fmt::Display for FunctionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

impl FunctionModel {
    pub fn new(id: impl Into<String>, kind: FunctionKind) -> Self {
        let domain = kind.default_domain();
        Self { id: id.into(), kind, domain }
    }

    pub fn quadratic(q: f64) -> Self {
        Self::new(format!("quadratic:{q}"), FunctionKind::Quadratic { q })
    }

    pub fn cubic() -> Self {
        Self::new("cubic", FunctionKind::Cubic)
    }

    pub fn signed_square() -> Self {
        Self::new("signed_square", FunctionKind::SignedSquare)
    }

    pub fn exp() -> Self {
        Self::new("exp", FunctionKind::Exp)
    }

    pub fn quartic() -> Self {
        Self::new("quartic", FunctionKind::Quartic)
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::new(format!("affine:{slope},{intercept}"), FunctionKind::Affine { slope, intercept })
    }

    pub fn tabulated(table: TabulatedFunction) -> Self {
        Self::new("tabulated", FunctionKind::Tabulated(table))
    }

    /// `−f`, with the domain kept.
    pub fn negated(&self) -> Self {
        Self {
            id: format!("neg:{}", self.id),
            kind: FunctionKind::Neg(Box::new(self.kind.clone())),
            domain: self.domain,
        }
    }

    /// `x ↦ f(x − by)`, with the domain moved by `by`.
    pub fn shifted(&self, by: f64) -> Self {
        Self {
            id: format!("shift:{by}:{}", self.id),
            kind: FunctionKind::Shift { by, inner: Box::new(self.kind.clone()) },
            domain: Interval::new(self.domain.lo() + by, self.domain.hi() + by).unwrap(),
        }
    }

    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn known_class(&self, c: f64) -> Option<KnownClass> {
        self.kind.known_class(c)
    }

    /// `Some(true)` when the model is known to be 3-convex on every interval,
    /// `Some(false)` when known 3-concave only, `None` when unknown.
    pub fn known_three_convex(&self) -> Option<bool> {
        self.kind.globally_three_convex()
    }

    pub fn has_analytic_d2(&self) -> bool {
        self.kind.d2(0.0, Side::Plus).is_some()
    }

    /// Evaluate without the domain check.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.kind.eval(x)
    }
}

/// `f(x)` for `x` in the model's domain.
pub fn eval_fn(f: &FunctionModel, x: f64) -> Result<f64> {
    let d = f.domain();
    if !d.contains(x, 0.0) {
        return Err(Error::OutOfDomain { x, lo: d.lo(), hi: d.hi() });
    }
    let y = f.value(x);
    if !y.is_finite() {
        return Err(Error::OutOfDomain { x, lo: d.lo(), hi: d.hi() });
    }
    Ok(y)
}

/// Finite-difference step used when none is given.
pub fn default_step(x: f64) -> f64 {
    1e-5 * 1f64.max(x.abs())
}

/// One-sided second difference, `O(h)` accurate on C³ pieces.
pub fn d2_numeric(f: &FunctionModel, x: f64, side: Side, h: f64) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Precondition(format!("step h = {h} must be positive")));
    }
    let dir = match side {
        Side::Minus => -1.0,
        Side::Plus => 1.0,
    };
    let far = x + dir * 2.0 * h;
    if !f.domain().contains(x, 0.0) || !f.domain().contains(far, 0.0) {
        return Err(Error::StencilOutOfDomain { x, h });
    }
    let f0 = eval_fn(f, x)?;
    let f1 = eval_fn(f, x + dir * h)?;
    let f2 = eval_fn(f, far)?;
    Ok((f0 - 2.0 * f1 + f2) / (h * h))
}

/// Left (`Minus`) or right (`Plus`) second derivative: analytic when the model
/// carries one, otherwise [`d2_numeric`] with step `h` (or [`default_step`]).
pub fn d2_one_sided(f: &FunctionModel, x: f64, side: Side, h: Option<f64>) -> Result<f64> {
    let d = f.domain();
    let room = match side {
        Side::Minus => x > d.lo() && x <= d.hi(),
        Side::Plus => x >= d.lo() && x < d.hi(),
    };
    if !room {
        return Err(Error::OutOfDomain { x, lo: d.lo(), hi: d.hi() });
    }
    match f.kind.d2(x, side) {
        Some(v) => Ok(v),
        None => d2_numeric(f, x, side, h.unwrap_or_else(|| default_step(x))),
    }
}

/// Parse a function spec (`name[:params]`) into a model.
pub fn catalog(spec: &str) -> Result<FunctionModel> {
    let spec = spec.trim();
    let bad = |reason: &str| Error::BadFunctionSpec { spec: spec.to_string(), reason: reason.to_string() };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")));
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n.trim(), Some(p)),
        None => (spec, None),
    };
    let no_params = |model: FunctionModel| match params {
        None => Ok(model),
        Some(_) => Err(bad("takes no parameters")),
    };
    match name {
        "quadratic" => {
            let q = params.map(num).transpose()?.unwrap_or(2.0);
            Ok(FunctionModel::quadratic(q))
        }
        "cubic" => no_params(FunctionModel::cubic()),
        "signed_square" => no_params(FunctionModel::signed_square()),
        "exp" => no_params(FunctionModel::exp()),
        "quartic" => no_params(FunctionModel::quartic()),
        "affine" => {
            let p = params.ok_or_else(|| bad("needs `slope,intercept`"))?;
            let (k, t) = p.split_once(',').ok_or_else(|| bad("needs `slope,intercept`"))?;
            Ok(FunctionModel::affine(num(k)?, num(t)?))
        }
        "tabulated" | "tabulated-spline" => {
            let path = params.ok_or_else(|| bad("needs a table path"))?;
            let table = TabulatedFunction::load(path.trim())?;
            Ok(FunctionModel::new(spec, FunctionKind::Tabulated(table)))
        }
        "neg" => {
            let inner = catalog(params.ok_or_else(|| bad("needs an inner spec"))?)?;
            Ok(inner.negated())
        }
        "shift" => {
            let p = params.ok_or_else(|| bad("needs `t:<spec>`"))?;
            let (t, inner) = p.split_once(':').ok_or_else(|| bad("needs `t:<spec>`"))?;
            Ok(catalog(inner)?.shifted(num(t)?))
        }
        other => Err(Error::UnknownFunction(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(eval_fn(&FunctionModel::cubic(), 2.0).unwrap(), 8.0);
        assert_eq!(eval_fn(&FunctionModel::signed_square(), -3.0).unwrap(), -9.0);
        assert_eq!(eval_fn(&FunctionModel::quadratic(2.0), 3.0).unwrap(), 9.0);
        assert!(matches!(eval_fn(&FunctionModel::exp(), 11.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn d2_examples() {
        let ss = FunctionModel::signed_square();
        assert_eq!(d2_one_sided(&ss, 0.0, Side::Minus, None).unwrap(), -2.0);
        assert_eq!(d2_one_sided(&ss, 0.0, Side::Plus, None).unwrap(), 2.0);
        let cubic = FunctionModel::cubic();
        assert_eq!(d2_one_sided(&cubic, 0.7, Side::Minus, None).unwrap(), 6.0 * 0.7);
        assert_eq!(d2_one_sided(&cubic, 0.7, Side::Plus, None).unwrap(), 6.0 * 0.7);
        let q = FunctionModel::quadratic(-3.0);
        assert_eq!(d2_one_sided(&q, 12.0, Side::Plus, None).unwrap(), -3.0);
    }

    #[test]
    fn numeric_d2_matches_signed_square_jump() {
        let ss = FunctionModel::signed_square();
        assert!((d2_numeric(&ss, 0.0, Side::Minus, 1e-3).unwrap() + 2.0).abs() < 1e-9);
        assert!((d2_numeric(&ss, 0.0, Side::Plus, 1e-3).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn numeric_d2_is_first_order() {
        // exp is C³: the one-sided error is ≈ h·f‴ and halves with h
        let f = FunctionModel::exp();
        let x = 0.5f64;
        let e1 = (d2_numeric(&f, x, Side::Plus, 1e-2).unwrap() - x.exp()).abs();
        let e2 = (d2_numeric(&f, x, Side::Plus, 5e-3).unwrap() - x.exp()).abs();
        assert!(e1 < 2.0 * 1e-2 * 2.0, "{e1}");
        assert!((e1 / e2 - 2.0).abs() < 0.1, "{}", e1 / e2);
    }

    #[test]
    fn stencil_needs_room() {
        let f = FunctionModel::exp();
        assert!(matches!(d2_numeric(&f, -10.0 + 1e-6, Side::Minus, 1e-3), Err(Error::StencilOutOfDomain { .. })));
        let table = TabulatedFunction::sample(|x| x * x, 0.0, 1.0, 11).unwrap();
        let t = FunctionModel::tabulated(table);
        assert!(d2_one_sided(&t, 0.0, Side::Minus, None).is_err());
    }

    #[test]
    fn catalog_known_classes() {
        let ss = catalog("signed_square").unwrap().known_class(0.0).unwrap();
        assert_eq!((ss.c, ss.a, ss.class), (0.0, 0.0, ClassKind::K1));
        assert_eq!(catalog("cubic").unwrap().known_class(1.0).unwrap().a, 6.0);
        let q = catalog("quadratic:2").unwrap().known_class(0.3).unwrap();
        assert_eq!((q.a, q.class), (2.0, ClassKind::Both));
        assert_eq!(catalog("exp").unwrap().known_class(0.0).unwrap().a, 1.0);
        let n = catalog("neg:signed_square").unwrap().known_class(0.0).unwrap();
        assert_eq!(n.class, ClassKind::K2);
        assert!(catalog("quartic").unwrap().known_class(0.0).is_none());
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(catalog("sine"), Err(Error::UnknownFunction(_))));
        assert!(matches!(catalog("cubic:3"), Err(Error::BadFunctionSpec { .. })));
        assert!(matches!(catalog("quadratic:x"), Err(Error::BadFunctionSpec { .. })));
        assert!(catalog("affine:3,1").is_ok());
    }

    #[test]
    fn shift_and_negation_compose() {
        let f = catalog("shift:0.5:cubic").unwrap();
        assert_eq!(f.value(1.5), 1.0);
        assert_eq!(d2_one_sided(&f, 1.5, Side::Plus, None).unwrap(), 6.0);
        assert_eq!(f.known_class(0.5).unwrap().a, 0.0);
        let g = catalog("neg:exp").unwrap();
        assert_eq!(g.value(0.0), -1.0);
        assert_eq!(g.domain(), Interval::new(-10.0, 10.0).unwrap());
    }

    #[test]
    fn table_parse_and_eval() {
        let t = TabulatedFunction::parse("# x, x^2\n0 0\n1, 1\n\n2 4 # tail\n3 9\n").unwrap();
        assert_eq!(t.nodes(), &[0.0, 1.0, 2.0, 3.0]);
        // quadratic data is reproduced exactly between nodes
        assert!((t.eval(1.5) - 2.25).abs() < 1e-12);
        assert!((t.eval(2.9) - 8.41).abs() < 1e-12);

        let err = TabulatedFunction::parse("0 0\n1 1\n1 2\n").unwrap_err();
        assert!(matches!(err, Error::TableParse { line: 3, .. }), "{err:?}");
        let err = TabulatedFunction::parse("0 0 0\n").unwrap_err();
        assert!(matches!(err, Error::TableParse { line: 1, .. }));
        assert!(TabulatedFunction::parse("0 0\n").is_err());
    }

    #[test]
    fn two_node_table_is_linear() {
        let t = TabulatedFunction::new(vec![0.0, 2.0], vec![1.0, 5.0]).unwrap();
        assert_eq!(t.eval(1.0), 3.0);
    }
}
