//! Seeded generation of scenarios that satisfy their hypotheses by
//! construction, and seeded search for counterexamples.
//!
//! All randomness comes from a ChaCha8 stream keyed by the seed, so equal
//! `(seed, spec)` pairs give bit-identical scenarios on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::affine::Mt1Scenario;
use crate::domain::{spread, AffineConfig, HullReading, Interval, WeightedGroup};
use crate::error::{Error, Result};
use crate::funclib::FunctionModel;
use crate::functional::{
    DiscreteFunctional, FamilyPair, FunctionOnOmega, Ic1Scenario, Ic2Scenario, Ic3Scenario, It2Scenario, It3Scenario, Level,
    Mc1Scenario, Mc2Scenario, Mc3Scenario, Mt4Scenario, Mt5Scenario, PairValues, Placed, Term,
};
use crate::report::{Mode, TheoremId, Verdict};
use crate::scenario::{run_payload, AffinePayload, Payload, SearchResult, SeedTrace};
use crate::EPS_EQ;

/// Attempts per scenario before generation reports infeasibility.
pub const MAX_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub interval: Interval,
    pub c: f64,
    /// `(n, m, l)`: plus-group sizes and minus-group size for affine
    /// configurations; inside nodes, outside nodes and extra levels for
    /// functional ones.
    pub sizes: (usize, usize, usize),
    pub count: usize,
}

impl GenSpec {
    pub fn new(seed: u64, interval: Interval, c: f64, sizes: (usize, usize, usize)) -> Result<Self> {
        if !interval.contains_interior(c) {
            return Err(Error::Precondition(format!(
                "c = {c} is not interior to [{}, {}]",
                interval.lo(),
                interval.hi()
            )));
        }
        if sizes.0 < 1 || sizes.1 < 1 {
            return Err(Error::Precondition(format!("sizes {sizes:?} must be at least (1, 1, 0)")));
        }
        Ok(Self { seed, interval, c, sizes, count: 1 })
    }

    /// `[-1, 1]`, `c = 0`, sizes `(2, 2, 1)`.
    pub fn standard(seed: u64) -> Self {
        Self { seed, interval: Interval::new(-1.0, 1.0).expect("valid"), c: 0.0, sizes: (2, 2, 1), count: 1 }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn left(&self) -> Interval {
        Interval::new(self.interval.lo(), self.c).expect("c interior")
    }

    fn right(&self) -> Interval {
        Interval::new(self.c, self.interval.hi()).expect("c interior")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideSel {
    Left,
    Right,
}

/// Derived seed for scenario `index` of a search; a SplitMix64 step.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// `n` positive weights summing to `total`.
fn split(rng: &mut ChaCha8Rng, total: f64, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|r| total * r / sum).collect()
}

fn points(rng: &mut ChaCha8Rng, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|_| uniform(rng, lo, hi)).collect()
}

fn affine_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64, sizes: (usize, usize, usize)) -> Result<AffineConfig> {
    let (n, m, l) = sizes;
    let (alpha, beta) = if l == 0 {
        let a = rng.gen_range(0.05..0.95);
        (a, 1.0 - a)
    } else {
        let a: f64 = rng.gen_range(0.3..=1.0);
        let b = rng.gen_range((1.05 - a).max(0.05)..=1.0);
        (a, b)
    };
    let gamma = alpha + beta - 1.0;
    let a = WeightedGroup::new(points(rng, lo, hi, n), split(rng, alpha, n))?;
    let b = WeightedGroup::new(points(rng, lo, hi, m), split(rng, beta, m))?;
    let ba = crate::domain::barycenter(&a)?;
    let bb = crate::domain::barycenter(&b)?;
    let minus = if l == 0 {
        WeightedGroup::empty()
    } else {
        WeightedGroup::new(points(rng, ba.min(bb), ba.max(bb), l), split(rng, gamma, l))?
    };
    AffineConfig::new(a, b, minus)
}

/// A valid configuration with every point on one side of `spec.c`.
pub fn gen_affine_config(spec: &GenSpec, side: SideSel) -> Result<AffineConfig> {
    let range = match side {
        SideSel::Left => spec.left(),
        SideSel::Right => spec.right(),
    };
    affine_in(&mut spec.rng(), range.lo(), range.hi(), spec.sizes)
}

/// Rescale every point about `anchor` by `k = sqrt(target / spread)`.
pub fn match_spread(target: f64, cfg: &AffineConfig, anchor: f64) -> Result<AffineConfig> {
    if target.is_nan() || target < 0.0 {
        return Err(Error::Precondition(format!("target spread {target} must be nonnegative")));
    }
    let s = spread(cfg)?;
    if s.is_nan() || s <= 0.0 {
        return Err(Error::ZeroSpread);
    }
    let k = (target / s).sqrt();
    Ok(cfg.map_points(|x| anchor + k * (x - anchor)))
}

/// Separated pair with equal spreads; the wider side shrinks toward `c`.
fn gen_mt1_with(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Result<Mt1Scenario> {
    let (l, r) = (spec.left(), spec.right());
    for _ in 0..MAX_RETRIES {
        let left = affine_in(rng, l.lo(), l.hi(), spec.sizes)?;
        let right = affine_in(rng, r.lo(), r.hi(), spec.sizes)?;
        let (sl, sr) = (left.signed_spread(), right.signed_spread());
        if !(sl > 1e-8 && sr > 1e-8) {
            continue;
        }
        let (left, right) = if sl > sr {
            (match_spread(sr, &left, spec.c)?, right)
        } else {
            (left, match_spread(sl, &right, spec.c)?)
        };
        return Ok(Mt1Scenario { interval: spec.interval, c: spec.c, left, right });
    }
    Err(Error::Infeasible("spread matching: no configuration with positive spread".into()))
}

/// Left configuration and its mirror image about `c`, which keeps both the
/// weights and the spread and so also satisfies the literal weight reading.
fn gen_mt1_mirrored(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Result<Mt1Scenario> {
    let (l, r) = (spec.left(), spec.right());
    let room = (spec.c - l.lo()).min(r.hi() - spec.c);
    let left = affine_in(rng, spec.c - room, spec.c, spec.sizes)?;
    let c = spec.c;
    Ok(Mt1Scenario { interval: spec.interval, c, right: left.map_points(|x| 2.0 * c - x), left })
}

/// Separated pair with `spread_left ≤ spread_right`, or the reverse when
/// `left_smaller` is false.
fn gen_ordered_with(rng: &mut ChaCha8Rng, spec: &GenSpec, left_smaller: bool) -> Result<Mt1Scenario> {
    let (l, r) = (spec.left(), spec.right());
    let left = affine_in(rng, l.lo(), l.hi(), spec.sizes)?;
    let right = affine_in(rng, r.lo(), r.hi(), spec.sizes)?;
    let (sl, sr) = (left.signed_spread(), right.signed_spread());
    let shrink = rng.gen_range(0.25..=1.0);
    let (left, right) = match left_smaller {
        true if sl > sr && sl > 0.0 => (match_spread(sr * shrink, &left, spec.c)?, right),
        false if sr > sl && sr > 0.0 => (left, match_spread(sl * shrink, &right, spec.c)?),
        _ => (left, right),
    };
    Ok(Mt1Scenario { interval: spec.interval, c: spec.c, left, right })
}

/// Roots `u ≤ v` of `u + v = 2·mean`, `u² + v² = 2·second`, by the
/// cancellation-free form of the quadratic formula.
pub fn solve_two_point(mean: f64, second: f64) -> Result<(f64, f64)> {
    let s = 2.0 * mean;
    let p = (s * s - 2.0 * second) / 2.0;
    let disc = s * s - 4.0 * p;
    if disc < 0.0 {
        return Err(Error::Infeasible(format!(
            "two-point moment system: second moment {second} is below mean² = {}",
            mean * mean
        )));
    }
    let root = disc.sqrt();
    let q = 0.5 * (s + if s >= 0.0 { root } else { -root });
    let (t1, t2) = if q == 0.0 { (0.0, 0.0) } else { (q, p / q) };
    Ok((t1.min(t2), t1.max(t2)))
}

fn functional(rng: &mut ChaCha8Rng, n: usize) -> Result<DiscreteFunctional> {
    DiscreteFunctional::new(split(rng, 1.0, n))
}

fn values(rng: &mut ChaCha8Rng, lo: f64, hi: f64, n: usize) -> Result<FunctionOnOmega> {
    FunctionOnOmega::new(points(rng, lo, hi, n))
}

/// A random subinterval of `[lo, hi]` covering between a fifth and three
/// fifths of it.
fn inner_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Result<Interval> {
    let w = hi - lo;
    let len = w * rng.gen_range(0.2..0.6);
    let a = uniform(rng, lo, hi - len);
    Interval::new(a, a + len)
}

/// Total-mass-one term valued in `range` and outside the open `inner`, with
/// mean `mu`. Two anchor nodes straddle `inner`; any further nodes carry a
/// small share of the mass.
fn outside_term(rng: &mut ChaCha8Rng, mu: f64, inner: Interval, range: Interval, m: usize) -> Option<Term> {
    let (a, b) = (inner.lo(), inner.hi());
    let u = uniform(rng, range.lo(), a);
    let v = uniform(rng, b, range.hi());
    if v - u <= 0.0 {
        return Term::from_vecs(vec![1.0], vec![u]).ok().filter(|_| (u - mu).abs() <= EPS_EQ);
    }
    let extras = m.saturating_sub(2);
    let rho = if extras > 0 { rng.gen_range(0.0..0.3) } else { 0.0 };
    let mut xs = vec![u, v];
    let mut ws = vec![0.0, 0.0];
    let mut extra_mean = 0.0;
    if extras > 0 {
        let shares = split(rng, rho, extras);
        for share in shares {
            let x = if rng.gen_bool(0.5) { uniform(rng, range.lo(), a) } else { uniform(rng, b, range.hi()) };
            extra_mean += share * x;
            xs.push(x);
            ws.push(share);
        }
    }
    let t = (mu - extra_mean) / (1.0 - rho);
    if !(t >= u && t <= v) {
        return None;
    }
    let w = (v - t) / (v - u);
    ws[0] = (1.0 - rho) * w;
    ws[1] = (1.0 - rho) * (1.0 - w);
    Term::from_vecs(ws, xs).ok()
}

/// Split a term's nodes into `parts` contiguous subfamilies.
fn partition(term: &Term, parts: usize) -> Result<Vec<Term>> {
    let n = term.values.len();
    let parts = parts.clamp(1, n);
    let (w, v) = (term.weights.weights(), term.values.values());
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for k in 0..parts {
        let end = start + (n - start) / (parts - k);
        out.push(Term::from_vecs(w[start..end].to_vec(), v[start..end].to_vec())?);
        start = end;
    }
    Ok(out)
}

fn retry<T>(what: &str, mut attempt: impl FnMut() -> Result<Option<T>>) -> Result<T> {
    for _ in 0..MAX_RETRIES {
        if let Some(t) = attempt()? {
            return Ok(t);
        }
    }
    Err(Error::Infeasible(format!("{what}: no admissible draw in {MAX_RETRIES} attempts")))
}

fn gen_it2(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Result<It2Scenario> {
    let outer = spec.interval;
    retry("inside/outside pair", || {
        let inner = inner_in(rng, outer.lo(), outer.hi())?;
        let l = functional(rng, spec.sizes.0)?;
        let g = values(rng, inner.lo(), inner.hi(), spec.sizes.0)?;
        let mu = crate::functional::apply(&l, &g)?;
        Ok(outside_term(rng, mu, inner, outer, spec.sizes.1.max(2))
            .map(|t| It2Scenario { inner, outer, l, g, h_functional: t.weights, h: t.values }))
    })
}

fn gen_ic1(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Result<Ic1Scenario> {
    let outer = spec.interval;
    let inner = inner_in(rng, outer.lo(), outer.hi())?;
    Ok(Ic1Scenario { inner, outer, l: functional(rng, spec.sizes.0)?, g: values(rng, inner.lo(), inner.hi(), spec.sizes.0)? })
}

/// Nested intervals centred at `m` with increasing half-widths, inside `range`.
fn nested(rng: &mut ChaCha8Rng, range: Interval, count: usize, centred: bool) -> Result<(f64, Vec<Interval>)> {
    let m = if centred {
        0.5 * (range.lo() + range.hi())
    } else {
        uniform(rng, range.lo() + 0.3 * range.width(), range.hi() - 0.3 * range.width())
    };
    let room = (m - range.lo()).min(range.hi() - m);
    let mut radii: Vec<f64> = (0..count).map(|_| room * rng.gen_range(0.1..0.9)).collect();
    radii.sort_by(f64::total_cmp);
    let intervals = radii.iter().map(|r| Interval::new(m - r, m + r)).collect::<Result<_>>()?;
    Ok((m, intervals))
}

/// Levels of a nested chain in `range`: level 0 inside the first interval,
/// level `k` outside the open interval `k − 1`, all with the same mean.
/// With `centred`, the intervals share the midpoint of `range`.
fn chain_levels(
    rng: &mut ChaCha8Rng,
    spec: &GenSpec,
    range: Interval,
    levels: usize,
    centred: bool,
) -> Result<(Vec<Interval>, Vec<Term>)> {
    retry("nested chain", || {
        let (_, intervals) = nested(rng, range, levels - 1, centred)?;
        let first = intervals[0];
        let l0 = functional(rng, spec.sizes.0)?;
        let g0 = values(rng, first.lo(), first.hi(), spec.sizes.0)?;
        let mu = crate::functional::apply(&l0, &g0)?;
        let mut terms = vec![Term::new(l0, g0)?];
        for k in 1..levels {
            let container = if k + 1 == levels { range } else { intervals[k] };
            match outside_term(rng, mu, intervals[k - 1], container, spec.sizes.1.max(2)) {
                Some(t) => terms.push(t),
                None => return Ok(None),
            }
        }
        Ok(Some((intervals.clone(), terms)))
    })
}

fn gen_ic2(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Result<Ic2Scenario> {
    let (intervals, levels) = chain_levels(rng, spec, spec.interval, 2 + spec.sizes.2, false)?;
    Ok(Ic2Scenario { intervals, outer: spec.interval, levels })
}

fn family(rng: &mut ChaCha8Rng, range: Interval, terms: usize, nodes: usize) -> Result<Vec<Term>> {
    let totals = split(rng, 1.0, terms);
    totals
        .into_iter()
        .map(|t| Term::new(DiscreteFunctional::new(split(rng, t, nodes))?, values(rng, range.lo(), range.hi(), nodes)?))
        .collect()
}

fn gen_ic3(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Result<Ic3Scenario> {
    Ok(Ic3Scenario { outer: spec.interval, terms: family(rng, spec.interval, spec.sizes.0, spec.sizes.1)? })
}

fn gen_it3(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Result<It3Scenario> {
    let outer = spec.interval;
    retry("inside/outside families", || {
        let inner = inner_in(rng, outer.lo(), outer.hi())?;
        let inside = family(rng, inner, spec.sizes.0, 2)?;
        let mu: f64 = inside.iter().map(Term::mean).sum();
        let parts = spec.sizes.1;
        Ok(match outside_term(rng, mu, inner, outer, parts + 1) {
            Some(t) => Some(It3Scenario { inner, outer, inside, outside: partition(&t, parts)? }),
            None => None,
        })
    })
}

/// `[r_min, r_max]` for the half-gap `r` of a two-point `h` around mean `mu`
/// that stays outside the open `inner` and inside `range`.
fn radius_range(mu: f64, inner: Interval, range: Interval) -> (f64, f64) {
    ((mu - inner.lo()).max(inner.hi() - mu), (mu - range.lo()).min(range.hi() - mu))
}

struct MomentPair {
    g: FunctionOnOmega,
    inner: Interval,
    mean: f64,
    variance: f64,
}

fn draw_pair_side(rng: &mut ChaCha8Rng, l: &DiscreteFunctional, inner: Interval) -> Result<MomentPair> {
    let g = values(rng, inner.lo(), inner.hi(), l.len())?;
    let mean = crate::functional::apply(l, &g)?;
    let variance = crate::functional::apply_square(l, &g)? - mean * mean;
    Ok(MomentPair { g, inner, mean, variance })
}

/// Common square-moment difference `D` admissible for both pairs, and the
/// resulting two-point `h` values; `None` when the admissible ranges miss.
fn common_moment(rng: &mut ChaCha8Rng, p1: &MomentPair, r1: Interval, p2: &MomentPair, r2: Interval) -> Result<Option<(FunctionOnOmega, FunctionOnOmega)>> {
    let (lo1, hi1) = radius_range(p1.mean, p1.inner, r1);
    let (lo2, hi2) = radius_range(p2.mean, p2.inner, r2);
    if lo1 > hi1 || lo2 > hi2 {
        return Ok(None);
    }
    let d_lo = (lo1 * lo1 - p1.variance).max(lo2 * lo2 - p2.variance);
    let d_hi = (hi1 * hi1 - p1.variance).min(hi2 * hi2 - p2.variance);
    if d_lo > d_hi {
        return Ok(None);
    }
    let d = uniform(rng, d_lo, d_hi);
    let h = |p: &MomentPair| -> Result<FunctionOnOmega> {
        let second = d + p.variance + p.mean * p.mean;
        let (u, v) = solve_two_point(p.mean, second)?;
        FunctionOnOmega::new(vec![u, v])
    };
    let (h1, h2) = (h(p1)?, h(p2)?);
    let fits = |h: &FunctionOnOmega, inner: Interval, range: Interval| {
        let tol = EPS_EQ * range.scale();
        h.values().iter().all(|x| range.contains(*x, tol) && (*x <= inner.lo() + tol || *x >= inner.hi() - tol))
    };
    if fits(&h1, p1.inner, r1) && fits(&h2, p2.inner, r2) {
        Ok(Some((h1, h2)))
    } else {
        Ok(None)
    }
}

fn pair_regions(spec: &GenSpec, mode: Mode) -> (Interval, Interval) {
    if mode.is_literal() {
        (spec.interval, spec.interval)
    } else {
        (spec.left(), spec.right())
    }
}

fn gen_mt4(rng: &mut ChaCha8Rng, spec: &GenSpec, mode: Mode) -> Result<Mt4Scenario> {
    let (r1, r2) = pair_regions(spec, mode);
    let h_functional = DiscreteFunctional::new(vec![0.5, 0.5])?;
    retry("two pairs with matched moments", || {
        let l = functional(rng, spec.sizes.0)?;
        let inner1 = inner_in(rng, r1.lo(), r1.hi())?;
        let inner2 = if mode.is_literal() { inner1 } else { inner_in(rng, r2.lo(), r2.hi())? };
        let p1 = draw_pair_side(rng, &l, inner1)?;
        let p2 = draw_pair_side(rng, &l, inner2)?;
        Ok(common_moment(rng, &p1, r1, &p2, r2)?.map(|(h1, h2)| Mt4Scenario {
            outer: spec.interval,
            c: spec.c,
            l: l.clone(),
            h_functional: h_functional.clone(),
            pair1: PairValues { g: p1.g, h: h1, inner: inner1 },
            pair2: PairValues { g: p2.g, h: h2, inner: inner2 },
        }))
    })
}

fn gen_mt5(rng: &mut ChaCha8Rng, spec: &GenSpec, mode: Mode) -> Result<Mt5Scenario> {
    let base = gen_mt4(rng, spec, mode)?;
    let fam = |p: &PairValues| -> Result<FamilyPair> {
        Ok(FamilyPair {
            inner: p.inner,
            inside: partition(&Term::new(base.l.clone(), p.g.clone())?, spec.sizes.0)?,
            outside: partition(&Term::new(base.h_functional.clone(), p.h.clone())?, spec.sizes.1)?,
        })
    };
    Ok(Mt5Scenario { outer: base.outer, c: base.c, base: fam(&base.pair1)?, starred: fam(&base.pair2)? })
}

/// Map carrying `[lo, hi]` (of width at most that of `target`) into `target`:
/// a random shift, or a reflection when literal.
fn relocation(rng: &mut ChaCha8Rng, lo: f64, hi: f64, target: Interval, mode: Mode) -> Box<dyn Fn(f64) -> f64> {
    if mode.is_literal() {
        let centre = lo + hi;
        Box::new(move |x| centre - x)
    } else {
        let t = uniform(rng, target.lo() - lo, target.hi() - hi);
        Box::new(move |x| x + t)
    }
}

/// Working range for the `g` side: narrow enough to be relocated into the `h` side.
fn g_range(spec: &GenSpec, mode: Mode) -> Result<Interval> {
    if mode.is_literal() {
        return Ok(spec.interval);
    }
    let (l, r) = (spec.left(), spec.right());
    let w = l.width().min(r.width());
    Interval::new(l.hi() - w, l.hi())
}

fn gen_mc1(rng: &mut ChaCha8Rng, spec: &GenSpec, mode: Mode) -> Result<Mc1Scenario> {
    let range = g_range(spec, mode)?;
    let inner1 = inner_in(rng, range.lo(), range.hi())?;
    let l = functional(rng, spec.sizes.0)?;
    let g1 = values(rng, inner1.lo(), inner1.hi(), spec.sizes.0)?;
    let (inner2, g2) = if mode.is_literal() {
        let centre = inner1.lo() + inner1.hi();
        (inner1, g1.map(|x| centre - x))
    } else {
        let map = relocation(rng, inner1.lo(), inner1.hi(), spec.right(), mode);
        (Interval::new(map(inner1.lo()), map(inner1.hi()))?, g1.map(&map))
    };
    Ok(Mc1Scenario {
        outer: spec.interval,
        c: spec.c,
        l,
        g1: Placed { values: g1, inner: inner1 },
        g2: Placed { values: g2, inner: inner2 },
    })
}

fn map_interval(iv: Interval, map: &dyn Fn(f64) -> f64) -> Result<Interval> {
    let (a, b) = (map(iv.lo()), map(iv.hi()));
    Interval::new(a.min(b), a.max(b))
}

fn gen_mc2(rng: &mut ChaCha8Rng, spec: &GenSpec, mode: Mode) -> Result<Mc2Scenario> {
    let range = g_range(spec, mode)?;
    let (g_intervals, terms) = chain_levels(rng, spec, range, 2 + spec.sizes.2, mode.is_literal())?;
    let map: Box<dyn Fn(f64) -> f64> = if mode.is_literal() {
        let centre = g_intervals[0].lo() + g_intervals[0].hi();
        Box::new(move |x| centre - x)
    } else {
        relocation(rng, range.lo(), range.hi(), spec.right(), mode)
    };
    let h_intervals = g_intervals.iter().map(|iv| map_interval(*iv, &*map)).collect::<Result<Vec<_>>>()?;
    let h_intervals = if mode.is_literal() { g_intervals.clone() } else { h_intervals };
    let levels = terms
        .into_iter()
        .map(|t| Level { h: t.values.map(&*map), l: t.weights, g: t.values })
        .collect();
    Ok(Mc2Scenario { outer: spec.interval, c: spec.c, levels, g_intervals, h_intervals })
}

fn gen_mc3(rng: &mut ChaCha8Rng, spec: &GenSpec, mode: Mode) -> Result<Mc3Scenario> {
    let range = g_range(spec, mode)?;
    let g = family(rng, range, spec.sizes.0, spec.sizes.1)?;
    let map: Box<dyn Fn(f64) -> f64> = if mode.is_literal() {
        let centre = spec.interval.lo() + spec.interval.hi();
        Box::new(move |x| centre - x)
    } else {
        relocation(rng, range.lo(), range.hi(), spec.right(), mode)
    };
    let terms = g.into_iter().map(|t| Level { h: t.values.map(&*map), l: t.weights, g: t.values }).collect();
    Ok(Mc3Scenario { outer: spec.interval, c: spec.c, terms })
}

fn gen_with(rng: &mut ChaCha8Rng, spec: &GenSpec, theorem: TheoremId, mode: Mode) -> Result<Payload> {
    Ok(match theorem {
        TheoremId::Affine => {
            let (lo, hi) = (spec.interval.lo(), spec.interval.hi());
            Payload::Affine(AffinePayload { config: affine_in(rng, lo, hi, spec.sizes)?, hull: HullReading::Barycenter })
        }
        TheoremId::Mt1 if mode.is_literal() => Payload::Mt1(gen_mt1_mirrored(rng, spec)?),
        TheoremId::Mt1 => Payload::Mt1(gen_mt1_with(rng, spec)?),
        TheoremId::Mt2 | TheoremId::Mt3 => {
            let left_smaller = rng.gen_bool(0.5);
            let s = gen_ordered_with(rng, spec, left_smaller)?;
            if theorem == TheoremId::Mt2 {
                Payload::Mt2(s)
            } else {
                Payload::Mt3(s)
            }
        }
        TheoremId::It2 => Payload::It2(gen_it2(rng, spec)?),
        TheoremId::Ic1 => Payload::Ic1(gen_ic1(rng, spec)?),
        TheoremId::Ic2 => Payload::Ic2(gen_ic2(rng, spec)?),
        TheoremId::Ic3 => Payload::Ic3(gen_ic3(rng, spec)?),
        TheoremId::It3 => Payload::It3(gen_it3(rng, spec)?),
        TheoremId::Mt4 => Payload::Mt4(gen_mt4(rng, spec, mode)?),
        TheoremId::Mc1 => Payload::Mc1(gen_mc1(rng, spec, mode)?),
        TheoremId::Mc2 => Payload::Mc2(gen_mc2(rng, spec, mode)?),
        TheoremId::Mc3 => Payload::Mc3(gen_mc3(rng, spec, mode)?),
        TheoremId::Mt5 => Payload::Mt5(gen_mt5(rng, spec, mode)?),
    })
}

/// One scenario for `theorem` whose hypotheses hold by construction.
pub fn gen_scenario(spec: &GenSpec, theorem: TheoremId, mode: Mode) -> Result<Payload> {
    gen_with(&mut spec.rng(), spec, theorem, mode)
}

/// A scenario whose hypotheses hold for `f` itself, including those that
/// depend on `f` (second-derivative signs, branch conditions, the constant
/// `A`). Draws sub-seeds of `spec.seed` until one qualifies.
pub fn gen_for_function(f: &FunctionModel, spec: &GenSpec, theorem: TheoremId, mode: Mode) -> Result<Payload> {
    let mut last = None;
    for k in 0..MAX_RETRIES as u64 {
        let attempt = if k == 0 { *spec } else { spec.with_seed(sub_seed(spec.seed, k)) };
        let payload = match gen_scenario(&attempt, theorem, mode) {
            Ok(p) => p,
            Err(Error::Infeasible(why)) => {
                last = Some(why);
                continue;
            }
            Err(e) => return Err(e),
        };
        let report = run_payload(f, &payload, mode, Default::default(), None, EPS_EQ)?;
        if report.verdict != Verdict::HypothesesUnmet {
            return Ok(payload);
        }
        last = report.hypotheses.violations().first().map(|v| v.name.clone());
    }
    Err(Error::Infeasible(format!(
        "no {theorem} scenario meets the hypotheses for `{}` in {MAX_RETRIES} draws (last failing check: {})",
        f.id(),
        last.unwrap_or_else(|| "none".into())
    )))
}

/// The functional scenarios only; see [`gen_scenario`].
pub fn gen_functional_scenario(spec: &GenSpec, theorem: TheoremId, mode: Mode) -> Result<Payload> {
    match theorem {
        TheoremId::Mt4 | TheoremId::Mt5 | TheoremId::Mc1 | TheoremId::Mc2 | TheoremId::Mc3 => gen_scenario(spec, theorem, mode),
        other => Err(Error::Precondition(format!("`{other}` is not a two-sided functional result"))),
    }
}

/// Separated, spread-matched pair for the two-sided affine refinement.
pub fn gen_mt1_scenario(spec: &GenSpec) -> Result<Mt1Scenario> {
    gen_mt1_with(&mut spec.rng(), spec)
}

/// The mean/square-moment instance on `[−3, 3]` with one shared inner
/// interval `[−1, 1]` across `c = 0`, where the second pair's outside values
/// solve `u + v = 1`, `u² + v² = 5.18`.
pub fn straddle_instance() -> Mt4Scenario {
    let r = 9.36f64.sqrt();
    let f = |v: Vec<f64>| FunctionOnOmega::new(v).expect("finite");
    let inner = Interval::new(-1.0, 1.0).expect("valid");
    Mt4Scenario {
        outer: Interval::new(-3.0, 3.0).expect("valid"),
        c: 0.0,
        l: DiscreteFunctional::new(vec![0.5, 0.5]).expect("valid"),
        h_functional: DiscreteFunctional::new(vec![0.5, 0.5]).expect("valid"),
        pair1: PairValues { g: f(vec![0.5, 0.5]), h: f(vec![-1.0, 2.0]), inner },
        pair2: PairValues { g: f(vec![0.2, 0.8]), h: f(vec![(1.0 + r) / 2.0, (1.0 - r) / 2.0]), inner },
    }
}

/// Straddling literal instance: both pairs share an inner interval around
/// `c`, with the first pair's `g` constant.
fn straddle_random(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Result<Mt4Scenario> {
    let outer = spec.interval;
    let h_functional = DiscreteFunctional::new(vec![0.5, 0.5])?;
    retry("straddling pair", || {
        let rad = rng.gen_range(0.1..0.6) * (spec.c - outer.lo()).min(outer.hi() - spec.c);
        let inner = Interval::new(spec.c - rad, spec.c + rad)?;
        let l = DiscreteFunctional::new(vec![0.5, 0.5])?;
        let mu = uniform(rng, inner.lo(), inner.hi());
        let p1 = MomentPair { g: FunctionOnOmega::new(vec![mu, mu])?, inner, mean: mu, variance: 0.0 };
        let spread = rng.gen_range(0.0..1.0) * (mu - inner.lo()).min(inner.hi() - mu);
        let g2 = FunctionOnOmega::new(vec![mu - spread, mu + spread])?;
        let p2 = MomentPair { g: g2, inner, mean: mu, variance: spread * spread };
        Ok(common_moment(rng, &p1, outer, &p2, outer)?.map(|(h1, h2)| Mt4Scenario {
            outer,
            c: spec.c,
            l: l.clone(),
            h_functional: h_functional.clone(),
            pair1: PairValues { g: p1.g, h: h1, inner },
            pair2: PairValues { g: p2.g, h: h2, inner },
        }))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub interval: Interval,
    pub c: f64,
    pub sizes: (usize, usize, usize),
    /// For literal two-pair searches: start with the documented straddling
    /// instance and draw straddling instances thereafter.
    pub straddle: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        let spec = GenSpec::standard(0);
        Self { interval: spec.interval, c: spec.c, sizes: spec.sizes, straddle: false }
    }
}

enum Probe {
    Found(SearchResult),
    Clean,
    Skipped,
}

fn probe(f: &FunctionModel, theorem: TheoremId, mode: Mode, seed: u64, index: u64, opts: &SearchOptions) -> Result<Probe> {
    let s = sub_seed(seed, index);
    let spec = GenSpec { seed: s, interval: opts.interval, c: opts.c, sizes: opts.sizes, count: 1 };
    let straddle = opts.straddle && theorem == TheoremId::Mt4 && mode.is_literal();
    let payload = if straddle && index == 0 {
        Ok(Payload::Mt4(straddle_instance()))
    } else if straddle {
        straddle_random(&mut spec.rng(), &spec).map(Payload::Mt4)
    } else {
        gen_scenario(&spec, theorem, mode)
    };
    let payload = match payload {
        Ok(p) => p,
        Err(Error::Infeasible(_)) => return Ok(Probe::Skipped),
        Err(e) => return Err(e),
    };
    let report = run_payload(f, &payload, mode, Default::default(), None, EPS_EQ)?;
    if report.verdict != Verdict::Fails {
        return Ok(Probe::Clean);
    }
    Ok(Probe::Found(SearchResult {
        theorem,
        mode,
        margin: report.min_margin().unwrap_or(f64::NEG_INFINITY),
        verdict: report.verdict,
        seed_trace: SeedTrace { seed, index, sub_seed: s },
        scenario: payload.to_value(),
    }))
}

/// Failing scenarios among `budget` seeded draws, most negative margin first,
/// and the number of draws that could not be generated.
pub fn search_counterexamples(
    f: &FunctionModel,
    theorem: TheoremId,
    mode: Mode,
    budget: u64,
    seed: u64,
    opts: &SearchOptions,
) -> Result<(Vec<SearchResult>, u64)> {
    if budget == 0 {
        return Err(Error::Precondition("budget must be at least 1".into()));
    }
    GenSpec::new(seed, opts.interval, opts.c, opts.sizes)?;
    #[cfg(feature = "parallel")]
    let probes: Vec<Result<Probe>> = {
        use rayon::prelude::*;
        (0..budget).into_par_iter().map(|i| probe(f, theorem, mode, seed, i, opts)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let probes: Vec<Result<Probe>> = (0..budget).map(|i| probe(f, theorem, mode, seed, i, opts)).collect();
    let mut found = Vec::new();
    let mut skipped = 0;
    for p in probes {
        match p? {
            Probe::Found(r) => found.push(r),
            Probe::Clean => {}
            Probe::Skipped => skipped += 1,
        }
    }
    found.sort_by(|a, b| a.margin.total_cmp(&b.margin).then(a.seed_trace.index.cmp(&b.seed_trace.index)));
    Ok((found, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::check_mt1_hypotheses;
    use crate::domain::validate_affine_config;

    #[test]
    fn affine_configs_are_valid_and_reproducible() {
        for seed in 0..200 {
            let spec = GenSpec::new(seed, Interval::new(-5.0, 5.0).unwrap(), 0.0, (3, 2, 2)).unwrap();
            for side in [SideSel::Left, SideSel::Right] {
                let cfg = gen_affine_config(&spec, side).unwrap();
                assert!(validate_affine_config(&cfg, EPS_EQ).is_valid());
            }
        }
        let spec = GenSpec::standard(42);
        assert_eq!(gen_affine_config(&spec, SideSel::Left).unwrap(), gen_affine_config(&spec, SideSel::Left).unwrap());
    }

    #[test]
    fn convex_case_without_minus_points() {
        let spec = GenSpec::new(3, Interval::new(-1.0, 1.0).unwrap(), 0.0, (1, 1, 0)).unwrap();
        let cfg = gen_affine_config(&spec, SideSel::Right).unwrap();
        assert_eq!(cfg.gamma(), 0.0);
        assert!((cfg.alpha() + cfg.beta() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn match_spread_examples() {
        let cfg = AffineConfig::from_singletons((0.0, 0.6), (2.0, 0.6), Some((1.0, 0.2))).unwrap();
        let s = spread(&cfg).unwrap();
        assert_eq!(match_spread(s, &cfg, 0.0).unwrap(), cfg);
        let half = match_spread(0.25 * s, &cfg, 0.0).unwrap();
        assert_eq!(half, cfg.map_points(|x| 0.5 * x));
        let flat = AffineConfig::from_singletons((1.0, 0.5), (1.0, 0.5), None).unwrap();
        assert_eq!(match_spread(1.0, &flat, 0.0), Err(Error::ZeroSpread));
    }

    #[test]
    fn mt1_scenarios_pass_their_checks() {
        for seed in 0..200 {
            let s = gen_mt1_scenario(&GenSpec::standard(seed)).unwrap();
            let r = check_mt1_hypotheses(&s, EPS_EQ);
            assert!(r.is_valid(), "seed {seed}: {:?}", r.violations());
        }
    }

    #[test]
    fn two_point_roots() {
        let (u, v) = solve_two_point(0.5, 2.59).unwrap();
        assert!((u - (1.0 - 9.36f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((v - (1.0 + 9.36f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!(matches!(solve_two_point(1.0, 0.5), Err(Error::Infeasible(_))));
    }

    #[test]
    fn budget_zero_is_rejected() {
        let r = search_counterexamples(&FunctionModel::signed_square(), TheoremId::Mt1, Mode::Proper, 0, 1, &SearchOptions::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
