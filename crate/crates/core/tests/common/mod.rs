#![allow(dead_code)]

use lieclass::detsys::{build_determining_system, condition, ConditionContext, ConditionName, VectorField};
use lieclass::equivalence::{act_on_coefficients, canonicalize_f, CanonicalTag, EquivalenceMap};
use lieclass::expr::shape::Assumptions;
use lieclass::expr::{parse, Bindings, Expr};
use lieclass::verifier::determining_from_prolongation;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn p(s: &str) -> Expr {
    parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// A rational `k/4` with `|k| <= 8`.
pub fn small_rational(rng: &mut ChaCha8Rng) -> Expr {
    Expr::rat(rng.gen_range(-8..=8), 4)
}

pub fn nonzero_rational(rng: &mut ChaCha8Rng) -> Expr {
    loop {
        let k = rng.gen_range(-8..=8);
        if k != 0 {
            return Expr::rat(k, 4);
        }
    }
}

/// Polynomial of degree at most `deg` in `var` with small rational
/// coefficients.
pub fn polynomial(rng: &mut ChaCha8Rng, var: &str, deg: u32) -> Expr {
    let v = Expr::sym(var);
    Expr::add((0..=deg).map(|k| small_rational(rng) * v.clone().powi(k as i64)).collect())
}

/// Polynomial in `x` and `y` of total degree at most `deg`.
pub fn polynomial2(rng: &mut ChaCha8Rng, deg: u32) -> Expr {
    let (x, y) = (Expr::sym("x"), Expr::sym("y"));
    let mut terms = Vec::new();
    for i in 0..=deg {
        for j in 0..=deg - i {
            terms.push(small_rational(rng) * x.clone().powi(i as i64) * y.clone().powi(j as i64));
        }
    }
    Expr::add(terms)
}

pub fn eval_xy(e: &Expr, x: f64, y: f64) -> Option<f64> {
    e.eval(&Bindings::new().with("x", x).with("y", y)).ok()
}

/// Largest `|e|` over `n` fixed-seed abscissae in `[-2, 2]`.
pub fn max_over_x(e: &Expr, seed: u64, n: usize) -> f64 {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let x = r.gen_range(-2.0..=2.0);
            e.eval(&Bindings::new().with("x", x)).expect("polynomial instance evaluates").abs()
        })
        .fold(0.0, f64::max)
}

fn cond(name: ConditionName, ctx: &ConditionContext, a: &Expr) -> Expr {
    condition(name, ctx).unwrap().instantiate(a)
}

/// `E1 + 5 E2' - 4 A E2`.
pub fn identity_i1(a: &Expr, theta: &Expr) -> Expr {
    let ctx = ConditionContext::theta(theta.clone());
    let e1 = cond(ConditionName::E1, &ctx, a);
    let e2 = cond(ConditionName::E2, &ctx, a);
    e1 + Expr::int(5) * e2.diff("x") - Expr::int(4) * a * e2
}

/// `E4' + 2 E3 - 2 A E4`.
pub fn identity_i2(a: &Expr, theta: &Expr) -> Expr {
    let ctx = ConditionContext::theta(theta.clone());
    let e3 = cond(ConditionName::E3, &ctx, a);
    let e4 = cond(ConditionName::E4, &ctx, a);
    e4.diff("x") + Expr::int(2) * e3 - Expr::int(2) * a * e4
}

/// `2 E5 - (3 + n) E6' + 2 (n - 1) A E6`.
pub fn identity_i3(a: &Expr, n: &Expr, lambda: &Expr) -> Expr {
    let ctx = ConditionContext::power(n.clone(), lambda.clone());
    let e5 = cond(ConditionName::E5, &ctx, a);
    let e6 = cond(ConditionName::E6, &ctx, a);
    Expr::int(2) * e5 - (Expr::int(3) + n) * e6.diff("x") + Expr::int(2) * (n - Expr::int(1)) * a * e6
}

/// `E7 - E8' + A E8` with `alpha` instantiated.
pub fn identity_i4(a: &Expr, alpha: &Expr, lambda: &Expr) -> Expr {
    let ctx = ConditionContext::lambda(lambda.clone());
    let e7 = cond(ConditionName::E7, &ctx, a).instantiate("alpha", alpha);
    let e8 = cond(ConditionName::E8, &ctx, a).instantiate("alpha", alpha);
    e7 - e8.diff("x") + a * e8
}

/// Largest pointwise gap between the prolongation-derived determining
/// equations and the hard-coded ones, over `points`.
pub fn prolongation_gap(a: &Expr, f: &Expr, v: &VectorField, points: &[(f64, f64)]) -> f64 {
    let hard = build_determining_system(a, f, v);
    let derived = determining_from_prolongation(v, a, f);
    let mut worst = 0.0f64;
    for (h, d) in hard.residuals.iter().zip(&derived) {
        for &(x, y) in points {
            let (hv, dv) = (eval_xy(h, x, y).unwrap(), eval_xy(d, x, y).unwrap());
            worst = worst.max((hv - dv).abs());
        }
    }
    worst
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n).map(|_| (rng.gen_range(-2.0..=2.0), rng.gen_range(0.2..=3.0))).collect()
}

/// Random map with small rational entries, `k1` and `k3` nonzero.
pub fn random_map(rng: &mut ChaCha8Rng) -> EquivalenceMap {
    let nonzero = [(1, 2), (-1, 2), (1, 1), (-1, 1), (2, 1), (-2, 1), (3, 2), (3, 1)];
    let any = [(0, 1), (1, 4), (-1, 2), (1, 1), (-3, 4), (2, 1)];
    let k1 = *nonzero.choose(rng).unwrap();
    let k2 = *any.choose(rng).unwrap();
    let k3 = *nonzero.choose(rng).unwrap();
    let k4 = *any.choose(rng).unwrap();
    EquivalenceMap::from_rationals([k1, k2, k3, k4]).unwrap()
}

/// One random instance per lemma case: the right-hand side and the tag
/// it must canonicalize to.
pub fn lemma_instance(case: char, rng: &mut ChaCha8Rng) -> (Expr, CanonicalTag) {
    let pick = |rng: &mut ChaCha8Rng, xs: &[&str]| xs.choose(rng).unwrap().to_string();
    let nz = ["1", "2", "-1", "1/2", "-3", "3/2"];
    let any = ["0", "1", "-2", "1/3", "5/2"];
    match case {
        'a' => {
            let (r, a, b) = (pick(rng, &nz), pick(rng, &nz), pick(rng, &any));
            let (c, s) = (pick(rng, &any), pick(rng, &any));
            if rng.gen_bool(0.25) {
                let f = format!("({r})*y^2 + ({a})*y + ({b})");
                (p(&f), CanonicalTag::QuadraticPlusConst)
            } else {
                let n = pick(rng, &["3", "4", "5", "-1", "-2", "-3"]);
                let f = format!("({r})*(({a})*y + ({b}))^({n}) + ({c})*y + ({s})");
                (p(&f), CanonicalTag::PowerPlusLinear)
            }
        }
        'b' => {
            let (r, a, c) = (pick(rng, &nz), pick(rng, &nz), pick(rng, &any));
            let b = pick(rng, &any);
            let f = format!("({r})*exp(({a})*y) + ({b})*y + ({c})");
            let tag = if b == "0" { CanonicalTag::ExpPlusConst } else { CanonicalTag::ExpPlusLinear };
            (p(&f), tag)
        }
        'c' => {
            let (a, b, c) = (pick(rng, &nz), pick(rng, &any), pick(rng, &any));
            (p(&format!("({a})*ln(y) + ({b})*y + ({c})")), CanonicalTag::LogPlusLinear)
        }
        'd' => {
            let (a, b, c) = (pick(rng, &nz), pick(rng, &any), pick(rng, &any));
            (p(&format!("({a})*y*ln(y) + ({b})*y + ({c})")), CanonicalTag::YLogYPlusConst)
        }
        'e' => {
            let (c, b) = (pick(rng, &any), pick(rng, &any));
            (p(&format!("({c})*y + ({b})")), CanonicalTag::Linear)
        }
        _ => unreachable!("lemma cases are a to e"),
    }
}

/// Canonicalizes `f` and returns the tag and the largest gap between the
/// witness image of `f` and the canonical expression, over `y` points
/// where both sides evaluate. `None` when 50 such points are not found
/// among 1000 draws.
pub fn canonical_gap(f: &Expr, seed: u64) -> (CanonicalTag, Option<f64>) {
    let cf = canonicalize_f(f, &Assumptions::new()).expect("numeric instance");
    let (_, image) = act_on_coefficients(&Expr::zero(), f, &cf.witness);
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut used = 0;
    for _ in 0..1000 {
        if used == 50 {
            break;
        }
        let y = r.gen_range(-3.0..=3.0);
        let b = Bindings::new().with("y", y);
        if let (Ok(u), Ok(v)) = (image.eval(&b), cf.expr.eval(&b)) {
            used += 1;
            worst = worst.max((u - v).abs() / (1.0 + v.abs()));
        }
    }
    (cf.tag, (used == 50).then_some(worst))
}
