//! Acceptance suite. Prints one PASS/FAIL line per criterion; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

mod common;

use std::time::{Duration, Instant};

use common::*;
use lieclass::classifier::{classify, ClassifyOptions, Dimension, Justification, Verdict};
use lieclass::detsys::{GridSpec, VectorField};
use lieclass::equivalence::act_on_coefficients;
use lieclass::expr::shape::Assumptions;
use lieclass::expr::Expr;
use lieclass::table::run_table;
use lieclass::verifier::{
    flow_runs, flow_transport_check, integrate_ode, FlowCheck, FLOW_EPS, FLOW_INITIALS, FLOW_STEP, FLOW_STEPS,
    FLOW_TOL,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(limit: Duration, started: Instant, pass: bool, detail: String) -> Outcome {
    let t = started.elapsed();
    let in_time = t <= limit;
    Outcome {
        pass: pass && in_time,
        detail: format!("{detail}; {:.2} s (limit {} s)", t.as_secs_f64(), limit.as_secs()),
    }
}

fn table_reproduction() -> Outcome {
    let started = Instant::now();
    let results = run_table(None, &GridSpec::default());
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{} A={} F={}: {}", r.case.row, r.case.a, r.case.f, r.failures.join(", ")))
        .collect();
    let detail = if failed.is_empty() {
        format!("{} concrete instances match", results.len())
    } else {
        failed.join(" | ")
    };
    within(Duration::from_secs(10), started, failed.is_empty() && results.len() >= 30, detail)
}

/// The identities are evaluated after exact expansion in rational
/// arithmetic. Evaluated unexpanded, the degree-15 terms of E1 reach 1e9
/// on the sample interval and rounding alone exceeds the tolerance.
fn structural_identities() -> Outcome {
    let started = Instant::now();
    let mut r = rng(1);
    let mut worst = [0.0f64; 4];
    for k in 0..10 {
        let a = polynomial(&mut r, "x", 3);
        let theta = small_rational(&mut r);
        worst[0] = worst[0].max(max_over_x(&identity_i1(&a, &theta).expand(), 100 + k, 50));
        worst[1] = worst[1].max(max_over_x(&identity_i2(&a, &theta).expand(), 200 + k, 50));
        let n = Expr::int([-2, 3, 5][k as usize % 3]);
        let lambda = small_rational(&mut r);
        worst[2] = worst[2].max(max_over_x(&identity_i3(&a, &n, &lambda).expand(), 300 + k, 50));
        let alpha = polynomial(&mut r, "x", 4);
        worst[3] = worst[3].max(max_over_x(&identity_i4(&a, &alpha, &lambda).expand(), 400 + k, 50));
    }
    let pass = worst.iter().all(|w| *w < 1e-8);
    within(Duration::from_secs(5), started, pass, format!("max residuals I1..I4 = {} (< 1e-8)", worst.map(|w| format!("{w:.2e}")).join(", ")))
}

fn prolongation_cross_check() -> Outcome {
    let started = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = polynomial(&mut r, "x", 2);
        let f = polynomial(&mut r, "y", 3);
        let v = VectorField::new(polynomial2(&mut r, 2), polynomial2(&mut r, 2));
        let pts = random_points(&mut r, 20);
        worst = worst.max(prolongation_gap(&a, &f, &v, &pts));
    }
    within(Duration::from_secs(5), started, worst < 1e-9, format!("50 triples, max gap {worst:.2e} (< 1e-9)"))
}

fn flow_transport() -> Outcome {
    let started = Instant::now();
    let symmetries = [
        ("3/x", "y^(-3)", "2*x", "y"),
        ("3/x", "exp(y)", "x", "-2"),
        ("0", "y^(-3) + y", "1", "0"),
        ("0", "y^(-3) + y", "exp(2*x)", "y*exp(2*x)"),
        ("0", "y^(-3) + y", "exp(-2*x)", "-y*exp(-2*x)"),
    ];
    let mut worst = 0.0f64;
    let mut problems = Vec::new();
    for (a, f, xi, phi) in symmetries {
        let v = VectorField::new(p(xi), p(phi));
        for run in flow_runs(&v, &p(a), &p(f), &FLOW_INITIALS) {
            match run.outcome {
                Ok(FlowCheck::Defect(d)) => {
                    worst = worst.max(d);
                    if d >= FLOW_TOL {
                        problems.push(format!("{v} for A={a}, F={f}: defect {d:.2e}"));
                    }
                }
                other => problems.push(format!("{v} for A={a}, F={f}: {other:?}")),
            }
        }
    }
    let dy = VectorField::new(Expr::zero(), Expr::one());
    let mut smallest = f64::INFINITY;
    for &(x0, y0, p0) in &FLOW_INITIALS {
        let curve = integrate_ode(&Expr::zero(), &p("y^2"), x0, y0, p0, FLOW_STEP, FLOW_STEPS).unwrap();
        match flow_transport_check(&dy, &Expr::zero(), &p("y^2"), FLOW_EPS, &curve) {
            FlowCheck::Defect(d) => smallest = smallest.min(d),
            other => problems.push(format!("dy for y^2: {other:?}")),
        }
    }
    if !(smallest > 1e-2) {
        problems.push(format!("non-symmetry dy for y^2 only reaches {smallest:.2e}"));
    }
    let detail = format!(
        "5 fields x 3 curves, max defect {worst:.2e} (< 1e-4); dy for y^2 min defect {smallest:.2e} (> 1e-2){}",
        if problems.is_empty() { String::new() } else { format!("; {}", problems.join(" | ")) }
    );
    within(Duration::from_secs(30), started, problems.is_empty(), detail)
}

fn equivalence_invariance() -> Outcome {
    let started = Instant::now();
    let rows = [("3/x", "exp(y)"), ("2", "y^(-1)"), ("0", "y^(-3)"), ("-(3/2)/x", "y^3"), ("x", "y^(-1) + y")];
    let opts = ClassifyOptions {
        verify: false,
        grid: GridSpec::default(),
    };
    let asm = Assumptions::new();
    let mut r = rng(5);
    let mut problems = Vec::new();
    for (a, f) in rows {
        let (a, f) = (p(a), p(f));
        let base = classify(&a, &f, &asm, &opts).map(|c| c.dimension);
        for _ in 0..10 {
            let g = random_map(&mut r);
            let (b, h) = act_on_coefficients(&a, &f, &g);
            let image = classify(&b, &h, &asm, &opts).map(|c| c.dimension);
            if image != base || !matches!(base, Ok(Dimension::Exact { .. })) {
                problems.push(format!("A={a}, F={f}, map {g}: {base:?} vs {image:?}"));
            }
        }
    }
    let detail = if problems.is_empty() { "5 rows x 10 maps keep their dimension".into() } else { problems.join(" | ") };
    within(Duration::from_secs(10), started, problems.is_empty(), detail)
}

fn lemma_canonicalization() -> Outcome {
    let started = Instant::now();
    let mut r = rng(6);
    let mut worst = 0.0f64;
    let mut problems = Vec::new();
    for case in ['a', 'b', 'c', 'd', 'e'] {
        for k in 0..20 {
            let (f, want) = lemma_instance(case, &mut r);
            match canonical_gap(&f, 600 + k) {
                (tag, Some(gap)) if tag == want => {
                    worst = worst.max(gap);
                    if gap >= 1e-10 {
                        problems.push(format!("({case}) {f}: gap {gap:.2e}"));
                    }
                }
                (tag, gap) => problems.push(format!("({case}) {f}: {tag:?}, want {want:?}, gap {gap:?}")),
            }
        }
    }
    let cf = lieclass::equivalence::canonicalize_f(&p("2*y^2 + 4*y + 1"), &Assumptions::new()).unwrap();
    let exact = cf.expr == p("y^2 - 2").normalize() && cf.witness.to_string() == "(k1=1, k2=0, k3=1/2, k4=-1)";
    if !exact {
        problems.push(format!("quadratic witness: {} via {}", cf.expr, cf.witness));
    }
    let detail = format!(
        "100 instances, max relative gap {worst:.2e} (< 1e-10); quadratic witness exact: {exact}{}",
        if problems.is_empty() { String::new() } else { format!("; {}", problems.join(" | ")) }
    );
    within(Duration::from_secs(2), started, problems.is_empty(), detail)
}

fn linear_case() -> Outcome {
    let started = Instant::now();
    let opts = ClassifyOptions::default();
    let free = classify(&Expr::zero(), &Expr::zero(), &Assumptions::new(), &opts).unwrap();
    let residuals: Vec<f64> = free.generators.iter().filter_map(|g| g.residual).collect();
    let free_ok = free.dimension == (Dimension::Exact { value: 8 })
        && free.generators.len() == 8
        && residuals.len() == 8
        && residuals.iter().all(|r| *r < 1e-10);
    let mut asm = Assumptions::new();
    asm.declare_nonzero("M");
    asm.declare_nonzero("lambda");
    let damped = classify(&p("M"), &p("lambda*y"), &asm, &opts).unwrap();
    let damped_ok = damped.dimension == (Dimension::Exact { value: 8 })
        && damped.verdict == Verdict::Definite
        && matches!(damped.justification, Justification::Known(_))
        && damped.generators.is_empty();
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    let detail = format!(
        "A=0,F=0: dim {} with {} generators, max residual {worst:.2e} (< 1e-10); A=M,F=lambda*y: dim {}, {} generators, known result recorded: {}",
        free.dimension,
        free.generators.len(),
        damped.dimension,
        damped.generators.len(),
        matches!(damped.justification, Justification::Known(_))
    );
    within(Duration::from_secs(10), started, free_ok && damped_ok, detail)
}

fn rk4_order() -> Outcome {
    let started = Instant::now();
    let err = |h: f64| {
        let steps = (2.0 * std::f64::consts::PI / h).round() as usize;
        let c = integrate_ode(&Expr::zero(), &p("-y"), 0.0, 0.0, 1.0, h, steps).unwrap();
        c.xs.iter().zip(&c.ys).map(|(x, y)| (y - x.sin()).abs()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(0.02), err(0.01));
    let factor = coarse / fine;
    within(
        Duration::from_secs(5),
        started,
        factor >= 14.0,
        format!("error {coarse:.2e} at h=0.02, {fine:.2e} at h=0.01, factor {factor:.2} (>= 14)"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("table reproduction", table_reproduction),
        ("structural identities", structural_identities),
        ("prolongation cross-check", prolongation_cross_check),
        ("flow transport", flow_transport),
        ("equivalence invariance", equivalence_invariance),
        ("lemma canonicalization", lemma_canonicalization),
        ("linear case", linear_case),
        ("RK4 order", rk4_order),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {} ({name}): {} - {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
