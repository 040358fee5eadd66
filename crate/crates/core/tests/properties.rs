use jensen3::affine::{jensen_affine_gap, verify_mt1, Mt1Scenario};
use jensen3::analysis::{classify_at_point, dd2, dd3, feasible_a_interval};
use jensen3::domain::{barycenter, combination_value, spread, validate_affine_config};
use jensen3::functional::{
    apply, apply_composed, apply_square, verify_it2, verify_it3, verify_mc1, verify_mc3, verify_mt4, verify_mt5,
    DiscreteFunctional, FunctionOnOmega, It3Scenario, Level, Mc3Scenario, Mt5Scenario, FamilyPair, Term,
};
use jensen3::scenario::Payload;
use jensen3::scengen::{gen_affine_config, gen_mt1_scenario, gen_scenario, match_spread, search_counterexamples, GenSpec, SearchOptions, SideSel};
use jensen3::{AffineConfig, FunctionModel, Interval, Mode, TheoremId, Verdict, WeightedGroup, EPS_EQ};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = GenSpec> {
    (any::<u64>(), -5.0..0.0f64, 0.5..5.0f64, 0.2..0.8f64, 1..4usize, 1..4usize, 0..3usize).prop_map(
        |(seed, lo, width, frac, n, m, l)| {
            let interval = Interval::new(lo, lo + width).unwrap();
            GenSpec::new(seed, interval, lo + frac * width, (n, m, l)).unwrap()
        },
    )
}

fn config_strategy() -> impl Strategy<Value = AffineConfig> {
    (spec_strategy(), any::<bool>()).prop_map(|(spec, left)| {
        gen_affine_config(&spec, if left { SideSel::Left } else { SideSel::Right }).unwrap()
    })
}

fn k1_at_zero() -> Vec<FunctionModel> {
    vec![FunctionModel::signed_square(), FunctionModel::cubic(), FunctionModel::exp(), FunctionModel::quadratic(-1.5)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn combination_lies_between_barycenters(cfg in config_strategy()) {
        let (a, b) = cfg.barycenter_hull().unwrap();
        let v = combination_value(&cfg).unwrap();
        prop_assert!(v >= a - EPS_EQ && v <= b + EPS_EQ);
        prop_assert!(validate_affine_config(&cfg, EPS_EQ).is_valid());
    }

    #[test]
    fn spread_is_nonnegative(cfg in config_strategy()) {
        prop_assert!(spread(&cfg).unwrap() >= -EPS_EQ);
    }

    #[test]
    fn affine_covariance(cfg in config_strategy(), k in -3.0..3.0f64, t in -2.0..2.0f64) {
        let moved = cfg.map_points(|x| k * x + t);
        let (v, s) = (combination_value(&cfg).unwrap(), spread(&cfg).unwrap());
        prop_assert!((combination_value(&moved).unwrap() - (k * v + t)).abs() <= 1e-12 * (1.0 + (k * v).abs() + t.abs()) * 10.0);
        prop_assert!((spread(&moved).unwrap() - k * k * s).abs() <= 1e-10 * (1.0 + k * k * s));
    }

    #[test]
    fn barycenter_ignores_weight_scale(
        pts in prop::collection::vec(-5.0..5.0f64, 1..6),
        raw in prop::collection::vec(0.01..1.0f64, 6),
        k in 0.01..100.0f64,
    ) {
        let w: Vec<f64> = raw[..pts.len()].to_vec();
        let g = WeightedGroup::new(pts.clone(), w.clone()).unwrap();
        let scaled = WeightedGroup::new(pts, w.iter().map(|x| k * x).collect()).unwrap();
        let (b1, b2) = (barycenter(&g).unwrap(), barycenter(&scaled).unwrap());
        prop_assert!((b1 - b2).abs() <= 1e-12 * (1.0 + b1.abs()));
    }

    #[test]
    fn convex_gap_is_nonnegative(cfg in config_strategy()) {
        for f in [FunctionModel::quadratic(1.0), FunctionModel::exp(), FunctionModel::quartic()] {
            prop_assert!(jensen_affine_gap(&f, &cfg).unwrap() >= -EPS_EQ);
        }
    }

    #[test]
    fn quadratic_gap_is_half_q_times_spread(cfg in config_strategy(), q in -4.0..4.0f64) {
        let gap = jensen_affine_gap(&FunctionModel::quadratic(q), &cfg).unwrap();
        let expected = 0.5 * q * spread(&cfg).unwrap();
        prop_assert!((gap - expected).abs() <= 1e-9 * gap.abs().max(1.0));
    }

    #[test]
    fn dd2_is_symmetric(x in -3.0..3.0f64, d1 in 0.01..1.0f64, d2 in 0.01..1.0f64) {
        let (a, b, c) = (x, x + d1, x + d1 + d2);
        for f in [FunctionModel::exp(), FunctionModel::cubic(), FunctionModel::quartic()] {
            let base = dd2(&f, a, b, c).unwrap();
            for (p, q, r) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                let v = dd2(&f, p, q, r).unwrap();
                prop_assert!((v - base).abs() <= 1e-9 * base.abs().max(1.0));
            }
        }
    }

    #[test]
    fn dd2_is_exact_on_quadratics(q in -5.0..5.0f64, x in -3.0..3.0f64, d1 in 0.05..1.0f64, d2 in 0.05..1.0f64) {
        let v = dd2(&FunctionModel::quadratic(q), x, x + d1, x + d1 + d2).unwrap();
        prop_assert!((v - q).abs() <= 1e-9 * q.abs().max(1.0));
    }

    #[test]
    fn dd3_nonnegative_for_three_convex(x in -3.0..2.0f64, d in prop::collection::vec(0.01..0.4f64, 3)) {
        let xs = [x, x + d[0], x + d[0] + d[1], x + d[0] + d[1] + d[2]];
        for f in [FunctionModel::cubic(), FunctionModel::signed_square(), FunctionModel::exp()] {
            prop_assert!(dd3(&f, xs[0], xs[1], xs[2], xs[3]).unwrap() >= -1e-6);
        }
    }

    #[test]
    fn match_spread_hits_target(cfg in config_strategy(), frac in 0.0..1.0f64) {
        let s = spread(&cfg).unwrap();
        prop_assume!(s > 1e-10);
        let target = frac * s;
        let out = match_spread(target, &cfg, cfg.min_point()).unwrap();
        prop_assert!((spread(&out).unwrap() - target).abs() <= 1e-9 * target.max(1.0));
    }

    #[test]
    fn apply_stays_in_range(w in prop::collection::vec(0.01..1.0f64, 1..6), seed in any::<u64>()) {
        let total: f64 = w.iter().sum();
        let l = DiscreteFunctional::new(w.iter().map(|x| x / total).collect()).unwrap();
        let g = FunctionOnOmega::new((0..w.len()).map(|i| ((seed >> (i * 8)) & 0xff) as f64 / 25.0 - 5.0).collect()).unwrap();
        let v = apply(&l, &g).unwrap();
        prop_assert!(v >= g.min_value() - 1e-12 && v <= g.max_value() + 1e-12);
        let q = 1.7;
        let jensen = apply_composed(&FunctionModel::quadratic(q), &l, &g).unwrap() - 0.5 * q * v * v;
        let expected = 0.5 * q * (apply_square(&l, &g).unwrap() - v * v);
        prop_assert!((jensen - expected).abs() <= 1e-9 * jensen.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn feasible_interval_shrinks_under_refinement(n in 20..200usize, c in -0.8..0.8f64) {
        let interval = Interval::new(-1.0, 1.0).unwrap();
        for f in [FunctionModel::cubic(), FunctionModel::exp(), FunctionModel::signed_square()] {
            let coarse = feasible_a_interval(&f, c, interval, n).unwrap();
            let fine = feasible_a_interval(&f, c, interval, 2 * n).unwrap();
            prop_assert!(fine.lo >= coarse.lo - 1e-6 * coarse.lo.abs().max(1.0));
            prop_assert!(fine.hi <= coarse.hi + 1e-6 * coarse.hi.abs().max(1.0));
        }
    }

    #[test]
    fn known_constant_is_feasible(c in -0.8..0.8f64) {
        let interval = Interval::new(-1.0, 1.0).unwrap();
        for f in [FunctionModel::cubic(), FunctionModel::exp(), FunctionModel::quadratic(2.0)] {
            let known = f.known_class(c).unwrap();
            let cls = classify_at_point(&f, c, interval, 400).unwrap();
            prop_assert!(cls.class.includes(known.class));
            let ai = feasible_a_interval(&f, c, interval, 400).unwrap();
            prop_assert!(ai.contains(known.a), "{} at {c}: {:?} vs {}", f.id(), ai, known.a);
        }
    }

    #[test]
    fn mt1_chains_are_ordered(seed in any::<u64>()) {
        let s = gen_mt1_scenario(&GenSpec::standard(seed)).unwrap();
        for f in k1_at_zero() {
            let r = verify_mt1(&f, None, &s, Mode::Proper, EPS_EQ).unwrap();
            prop_assert_eq!(r.verdict, Verdict::Holds);
            let ch = r.chain.unwrap();
            let tol = 1e-9 * ch.values().iter().fold(1f64, |m, v| m.max(v.abs()));
            prop_assert!(ch.gap_left <= ch.mid_left + tol);
            prop_assert!(ch.mid_left <= ch.mid_right + tol);
            prop_assert!(ch.mid_right <= ch.gap_right + tol);
        }
    }

    #[test]
    fn mt1_margins_are_translation_invariant(seed in any::<u64>(), t in -3.0..3.0f64) {
        let s = gen_mt1_scenario(&GenSpec::standard(seed)).unwrap();
        let moved: Mt1Scenario = s.shifted(t).unwrap();
        for f in [FunctionModel::cubic(), FunctionModel::signed_square()] {
            let a = f.known_class(0.0).unwrap().a;
            let r0 = verify_mt1(&f, Some(a), &s, Mode::Proper, EPS_EQ).unwrap();
            let r1 = verify_mt1(&f.shifted(t), Some(a), &moved, Mode::Proper, EPS_EQ).unwrap();
            prop_assert_eq!(r0.verdict, r1.verdict);
            for (m0, m1) in r0.margins.iter().zip(&r1.margins) {
                prop_assert_eq!(&m0.name, &m1.name);
                prop_assert!((m0.value - m1.value).abs() <= 1e-9, "{}: {} vs {}", m0.name, m0.value, m1.value);
            }
        }
    }

    #[test]
    fn region_mt4_holds_for_k1_functions(seed in any::<u64>()) {
        let Payload::Mt4(s) = gen_scenario(&GenSpec::standard(seed), TheoremId::Mt4, Mode::RegionRestricted).unwrap() else {
            unreachable!()
        };
        for f in k1_at_zero() {
            let r = verify_mt4(&f, None, &s, Mode::RegionRestricted, EPS_EQ).unwrap();
            prop_assert_eq!(r.verdict, Verdict::Holds, "{}: {:?}", f.id(), r.margins);
        }
    }

    #[test]
    fn it2_holds_for_convex_functions(seed in any::<u64>()) {
        let Payload::It2(s) = gen_scenario(&GenSpec::standard(seed), TheoremId::It2, Mode::Proper).unwrap() else {
            unreachable!()
        };
        for f in [FunctionModel::quadratic(1.0), FunctionModel::exp(), FunctionModel::quartic()] {
            prop_assert!(verify_it2(&f, &s, EPS_EQ).unwrap().margin.unwrap() >= -EPS_EQ);
        }
    }

    #[test]
    fn it3_with_singleton_families_matches_it2(seed in any::<u64>()) {
        let Payload::It2(s) = gen_scenario(&GenSpec::standard(seed), TheoremId::It2, Mode::Proper).unwrap() else {
            unreachable!()
        };
        let single = It3Scenario {
            inner: s.inner,
            outer: s.outer,
            inside: vec![Term::new(s.l.clone(), s.g.clone()).unwrap()],
            outside: vec![Term::new(s.h_functional.clone(), s.h.clone()).unwrap()],
        };
        let f = FunctionModel::exp();
        let (a, b) = (verify_it2(&f, &s, EPS_EQ).unwrap(), verify_it3(&f, &single, EPS_EQ).unwrap());
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert!((a.margin.unwrap() - b.margin.unwrap()).abs() <= EPS_EQ);
    }

    #[test]
    fn mt5_with_singleton_families_matches_mt4(seed in any::<u64>()) {
        let Payload::Mt4(s) = gen_scenario(&GenSpec::standard(seed), TheoremId::Mt4, Mode::RegionRestricted).unwrap() else {
            unreachable!()
        };
        let family = |p: &jensen3::functional::PairValues| FamilyPair {
            inner: p.inner,
            inside: vec![Term::new(s.l.clone(), p.g.clone()).unwrap()],
            outside: vec![Term::new(s.h_functional.clone(), p.h.clone()).unwrap()],
        };
        let five = Mt5Scenario { outer: s.outer, c: s.c, base: family(&s.pair1), starred: family(&s.pair2) };
        let f = FunctionModel::cubic();
        let a = verify_mt4(&f, None, &s, Mode::RegionRestricted, EPS_EQ).unwrap();
        let b = verify_mt5(&f, None, &five, Mode::RegionRestricted, EPS_EQ).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert!((a.margin.unwrap() - b.margin.unwrap()).abs() <= EPS_EQ);
    }

    #[test]
    fn mc3_with_one_term_matches_mc1(seed in any::<u64>()) {
        let Payload::Mc1(s) = gen_scenario(&GenSpec::standard(seed), TheoremId::Mc1, Mode::RegionRestricted).unwrap() else {
            unreachable!()
        };
        let three = Mc3Scenario {
            outer: s.outer,
            c: s.c,
            terms: vec![Level { l: s.l.clone(), g: s.g1.values.clone(), h: s.g2.values.clone() }],
        };
        let f = FunctionModel::exp();
        let a = verify_mc1(&f, None, &s, Mode::RegionRestricted, EPS_EQ).unwrap();
        let b = verify_mc3(&f, None, &three, Mode::RegionRestricted, EPS_EQ).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert!((a.value_named("gap1").unwrap() - b.value_named("gap_g").unwrap()).abs() <= EPS_EQ);
        prop_assert!((a.value_named("gap2").unwrap() - b.value_named("gap_h").unwrap()).abs() <= EPS_EQ);
    }
}

#[test]
fn search_finds_nothing_for_k1_functions_in_sound_modes() {
    let opts = SearchOptions::default();
    let cases = [
        (TheoremId::Mt1, Mode::Proper),
        (TheoremId::Mt2, Mode::Proper),
        (TheoremId::Mt4, Mode::RegionRestricted),
        (TheoremId::Mt5, Mode::RegionRestricted),
        (TheoremId::Mc1, Mode::RegionRestricted),
        (TheoremId::Mc2, Mode::RegionRestricted),
        (TheoremId::Mc3, Mode::RegionRestricted),
    ];
    for f in k1_at_zero() {
        for (theorem, mode) in cases {
            let (found, _) = search_counterexamples(&f, theorem, mode, 300, 2024, &opts).unwrap();
            assert!(found.is_empty(), "{} {theorem} {mode}: {:?}", f.id(), found.first().map(|r| r.margin));
        }
    }
}
