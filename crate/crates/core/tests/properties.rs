//! Property tests. Every suite runs from a fixed seed so failures
//! reproduce.

mod common;

use common::*;
use lieclass::classifier::{classify, ClassifyOptions};
use lieclass::detsys::{build_determining_system, reduced_ansatz, reduced_residuals, GridSpec, VectorField};
use lieclass::equivalence::{act_on_coefficients, EquivalenceMap};
use lieclass::expr::shape::{match_shape, Assumptions, Shape};
use lieclass::expr::{parse, Bindings, Expr};
use lieclass::input::Problem;
use lieclass::report::classification_json;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::Rng;

fn config(cases: u32, seed: u64) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Grammar-valid expression text over `vars`.
fn expr_text(vars: &'static [&'static str]) -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        prop::sample::select(vars.to_vec()).prop_map(str::to_string),
        (1i64..9).prop_map(|k| k.to_string()),
        (1i64..9, 2i64..5).prop_map(|(a, b)| format!("{a}/{b}")),
        Just("0.5".to_string()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/({b})")),
            (inner.clone(), prop::sample::select(vec!["2", "3", "(-1)", "(1/2)"])).prop_map(|(a, k)| format!("({a})^{k}")),
            (inner.clone(), prop::sample::select(vec!["exp", "ln", "sin", "cos", "tan", "sqrt"]))
                .prop_map(|(a, f)| format!("{f}({a})")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
}

fn at_x(e: &Expr, x: f64) -> Option<f64> {
    e.eval(&Bindings::new().with("x", x)).ok().filter(|v| v.is_finite())
}

proptest! {
    #![proptest_config(config(256, 11))]

    #[test]
    fn printed_expressions_reparse_to_the_same_tree(s in expr_text(&["x", "y", "m"])) {
        let e = parse(&s).unwrap();
        let printed = e.to_string();
        let again = parse(&printed).unwrap();
        prop_assert_eq!(&again, &e, "{} printed as {}", s, printed);
    }

    #[test]
    fn normalization_is_idempotent(s in expr_text(&["x", "y"])) {
        let e = parse(&s).unwrap();
        let once = e.normalize();
        prop_assert_eq!(once.normalize(), once);
    }
}

proptest! {
    #![proptest_config(config(100, 12))]

    #[test]
    fn derivatives_match_central_differences(s in expr_text(&["x"]), x in -2.0f64..2.0) {
        let e = parse(&s).unwrap();
        let d = e.diff("x");
        // Stay at least 1e-3 away from poles and branch points.
        let near = [x - 1e-3, x + 1e-3].iter().all(|&z| at_x(&e, z).is_some_and(|v| v.abs() < 1e4));
        let (Some(v), Some(dv), Some(up), Some(down)) = (at_x(&e, x), at_x(&d, x), at_x(&e, x + 1e-5), at_x(&e, x - 1e-5))
        else {
            return Ok(());
        };
        prop_assume!(near && v.abs() < 1e4 && dv.abs() < 1e4);
        let fd = (up - down) / 2e-5;
        prop_assert!((dv - fd).abs() <= 1e-6 * dv.abs().max(1.0), "{}: d = {}, fd = {}", s, dv, fd);
    }
}

fn coeff() -> impl Strategy<Value = i64> {
    prop_oneof![-4i64..=-1, 1i64..=4]
}

proptest! {
    #![proptest_config(config(100, 13))]

    #[test]
    fn matched_shapes_reconstruct_the_input(
        kind in 0usize..5,
        r in coeff(), a in coeff(), b in -3i64..=3, c in -3i64..=3, s in -3i64..=3,
        n in prop::sample::select(vec![-3i64, -2, -1, 3, 4, 5]),
    ) {
        let text = match kind {
            0 => format!("({r})*(({a})*y + ({b}))^({n}) + ({c})*y + ({s})"),
            1 => format!("({r})*exp(({a})*y) + ({b})*y + ({c})"),
            2 => format!("({a})*ln(y) + ({b})*y + ({c})"),
            3 => format!("({a})*y*ln(y) + ({b})*y + ({c})"),
            _ => format!("({a})*y^2 + ({b})*y + ({c})"),
        };
        let f = parse(&text).unwrap();
        let shape = match_shape(&f, "y", &Assumptions::new()).unwrap();
        prop_assert!(shape != Shape::Unrecognized, "{}", text);
        let back = shape.reconstruct("y").unwrap();
        let mut rng = rng((r + 17) as u64);
        for _ in 0..50 {
            let y = rng.gen_range(0.2..3.0);
            let bnd = Bindings::new().with("y", y);
            if let (Ok(u), Ok(v)) = (f.eval(&bnd), back.eval(&bnd)) {
                prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()), "{}: {} vs {}", text, u, v);
            }
        }
    }
}

fn map() -> impl Strategy<Value = EquivalenceMap> {
    let nz = prop_oneof![-4i64..=-1, 1i64..=4];
    (nz.clone(), 1i64..4, -4i64..=4, nz, 1i64..4, -4i64..=4)
        .prop_map(|(a, ad, b, c, cd, d)| EquivalenceMap::from_rationals([(a, ad), (b, 2), (c, cd), (d, 3)]).unwrap())
}

fn gap_xy(u: &Expr, v: &Expr, var: &str, seed: u64) -> f64 {
    let mut rng = rng(seed);
    (0..50)
        .filter_map(|_| {
            let t = rng.gen_range(-2.0..2.0);
            let b = Bindings::new().with(var, t);
            match (u.eval(&b), v.eval(&b)) {
                (Ok(p), Ok(q)) => Some((p - q).abs() / (1.0 + q.abs())),
                _ => None,
            }
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(config(20, 14))]

    #[test]
    fn acting_then_inverting_is_the_identity(g in map()) {
        let (a, f) = (p("tan(x) + x^2"), p("exp(y) + y^3"));
        let (b, h) = act_on_coefficients(&a, &f, &g);
        let (a2, f2) = act_on_coefficients(&b, &h, &g.invert());
        prop_assert!(gap_xy(&a2, &a, "x", 1) < 1e-10);
        prop_assert!(gap_xy(&f2, &f, "y", 2) < 1e-10);
    }

    #[test]
    fn acting_twice_is_acting_by_the_composite(g in map(), h in map()) {
        let (a, f) = (p("sin(x)/(x^2 + 1)"), p("y^4 - 2*y"));
        let (a1, f1) = act_on_coefficients(&a, &f, &g);
        let (a2, f2) = act_on_coefficients(&a1, &f1, &h);
        let (a3, f3) = act_on_coefficients(&a, &f, &g.then(&h));
        prop_assert!(gap_xy(&a2, &a3, "x", 3) < 1e-10);
        prop_assert!(gap_xy(&f2, &f3, "y", 4) < 1e-10);
    }

    #[test]
    fn only_the_identity_fixes_a_transcendental_pair(g in map()) {
        prop_assume!(!g.is_identity());
        let (a, f) = (p("tan(x)"), p("exp(y)"));
        let (b, h) = act_on_coefficients(&a, &f, &g);
        prop_assert!(gap_xy(&b, &a, "x", 5) > 1e-6 || gap_xy(&h, &f, "y", 6) > 1e-6);
    }
}

proptest! {
    #![proptest_config(config(10, 15))]

    #[test]
    fn structural_identities_hold(seed in any::<u64>(), n in prop::sample::select(vec![-2i64, 3, 5])) {
        let mut r = rng(seed);
        let a = polynomial(&mut r, "x", 3);
        let theta = small_rational(&mut r);
        let lambda = small_rational(&mut r);
        let alpha = polynomial(&mut r, "x", 3);
        let n = Expr::int(n);
        for e in [
            identity_i1(&a, &theta),
            identity_i2(&a, &theta),
            identity_i3(&a, &n, &lambda),
            identity_i4(&a, &alpha, &lambda),
        ] {
            prop_assert!(max_over_x(&e.expand(), seed, 50) < 1e-8);
        }
    }

    #[test]
    fn the_ansatz_reproduces_the_reduced_equations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = polynomial(&mut r, "x", 2);
        let f = polynomial(&mut r, "y", 4);
        let ansatz = reduced_ansatz(&a).field;
        let full = build_determining_system(&a, &f, &ansatz);
        let reduced = reduced_residuals(&a, &f);
        let unknowns: Vec<(&str, Expr)> =
            ["alpha", "beta", "sigma", "tau"].into_iter().map(|u| (u, polynomial(&mut r, "x", 3))).collect();
        let fill = |e: &Expr| unknowns.iter().fold(e.clone(), |acc, (u, q)| acc.instantiate(u, q));
        let expected = [Expr::zero(), fill(&reduced[0]), fill(&reduced[1]), Expr::zero()];
        let points = random_points(&mut r, 20);
        for (got, want) in full.residuals.iter().map(fill).zip(&expected) {
            for &(x, y) in &points {
                let (g, w) = (eval_xy(&got, x, y).unwrap(), eval_xy(want, x, y).unwrap());
                prop_assert!((g - w).abs() < 1e-9 * (1.0 + w.abs()), "{} vs {} at ({}, {})", g, w, x, y);
            }
        }
    }
}

proptest! {
    #![proptest_config(config(50, 16))]

    #[test]
    fn prolongation_matches_the_hard_coded_system(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = polynomial(&mut r, "x", 2);
        let f = polynomial(&mut r, "y", 3);
        let v = VectorField::new(polynomial2(&mut r, 2), polynomial2(&mut r, 2));
        let pts = random_points(&mut r, 10);
        prop_assert!(prolongation_gap(&a, &f, &v, &pts) < 1e-9);
    }
}

const INVARIANCE_ROWS: [(&str, &str); 5] =
    [("-1/x", "exp(y)"), ("3/x", "y^(-1)"), ("0", "y^5"), ("2/x", "y^(-3)"), ("1", "ln(y) + y")];

proptest! {
    #![proptest_config(config(10, 17))]

    #[test]
    fn dimensions_are_invariant_under_equivalence(g in map()) {
        let opts = ClassifyOptions { verify: false, grid: GridSpec::default() };
        let asm = Assumptions::new();
        for (a, f) in INVARIANCE_ROWS {
            let (a, f) = (p(a), p(f));
            let base = classify(&a, &f, &asm, &opts).unwrap().dimension;
            let (b, h) = act_on_coefficients(&a, &f, &g);
            let image = classify(&b, &h, &asm, &opts).unwrap().dimension;
            prop_assert_eq!(image, base, "A = {}, F = {}, map {}", a, f, g);
        }
    }
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    for (a, f, params) in [("M/x", "mu*exp(y)", vec!["M=3", "mu=1"]), ("x", "y^2 + 1", vec![]), ("0", "0", vec![])] {
        let decls: Vec<_> = params.iter().map(|s| s.parse().unwrap()).collect();
        let render = || {
            let prob = Problem::new(a, f, &decls).unwrap();
            let r = classify(&prob.a, &prob.f, &prob.assumptions, &ClassifyOptions::default()).unwrap();
            serde_json::to_string_pretty(&classification_json(&prob, &r, GridSpec::DEFAULT_SEED)).unwrap()
        };
        assert_eq!(render(), render());
    }
}
