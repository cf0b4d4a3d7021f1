//! The case analysis for a canonical `F`, in canonical coordinates (the
//! witness map never touches `x`, so `A` is unchanged).

use num_traits::Zero;

use super::engine::{self, Candidates, EngineOutcome, Residual, ZeroTest};
use super::family::AFamily;
use super::{ClassifyError, ConditionReport, ConditionVerdict, Dimension, Justification, Verdict};
use crate::detsys::{condition, ConditionContext, ConditionName, VectorField};
use crate::equivalence::{CanonicalF, CanonicalTag};
use crate::expr::shape::Assumptions;
use crate::expr::{Expr, Rational};

/// Builds the symmetry with a given `beta` (and `A`).
pub type FieldOf = Box<dyn Fn(&Expr, &Expr) -> VectorField>;

/// Everything the case analysis decides, before generators are moved back
/// to the original coordinates and verified.
pub struct CaseOutcome {
    pub label: String,
    pub dimension: Dimension,
    pub verdict: Verdict,
    pub justification: Justification,
    pub generators: Vec<VectorField>,
    pub conditions: Vec<ConditionReport>,
    pub notes: Vec<String>,
}

impl CaseOutcome {
    fn known(label: &str, dim: usize, why: &str) -> Self {
        Self {
            label: label.to_string(),
            dimension: Dimension::Exact { value: dim },
            verdict: Verdict::Definite,
            justification: Justification::Known(why.to_string()),
            generators: Vec::new(),
            conditions: Vec::new(),
            notes: Vec::new(),
        }
    }
}

fn dx() -> VectorField {
    VectorField::new(Expr::one(), Expr::zero())
}

/// A family whose dimension is known in closed form, used to
/// promote a numerical rank to an exact claim.
struct KnownFamily {
    dim: usize,
    name: String,
}

pub fn analyse(a: &Expr, cf: &CanonicalF, family: &AFamily, asm: &Assumptions) -> Result<CaseOutcome, ClassifyError> {
    let zero = |e: &Option<Expr>| -> Result<bool, ClassifyError> {
        match e {
            Some(e) => Ok(asm.is_zero(e)?),
            None => Ok(true),
        }
    };
    match cf.tag {
        CanonicalTag::Linear => Ok(linear_case(a, cf, family, asm)?),
        CanonicalTag::QuadraticPlusConst => quadratic_case(a, cf, family, asm),
        CanonicalTag::ExpPlusLinear => constant_rule(a, family, "exponential plus linear"),
        CanonicalTag::ExpPlusConst if zero(&cf.theta)? => exp_theta_zero(a, family, asm),
        CanonicalTag::ExpPlusConst => exp_theta_nonzero(a, cf, family, asm),
        CanonicalTag::LogPlusLinear => constant_rule(a, family, "logarithmic"),
        CanonicalTag::YLogYPlusConst if zero(&cf.theta)? => ylog_theta_zero(a, cf, family),
        CanonicalTag::YLogYPlusConst => constant_rule(a, family, "y ln y plus nonzero constant"),
        CanonicalTag::PowerPlusLinear if !zero(&cf.theta)? => constant_rule(a, family, "power plus nonzero constant"),
        CanonicalTag::PowerPlusLinear => power_case(a, cf, family, asm),
        CanonicalTag::Generic => constant_rule(a, family, "generic nonlinear"),
    }
}

/// Only translations in `x` survive: dimension one for constant `A`, zero
/// otherwise.
fn constant_rule(a: &Expr, family: &AFamily, what: &str) -> Result<CaseOutcome, ClassifyError> {
    let label = format!("{what} F");
    let constant = match family {
        AFamily::Constant(_) => ZeroTest::Zero,
        _ => engine::zero_on_window(&a.diff("x"), family)?,
    };
    let why = "for this F the determining equations force xi = const, phi = 0, which needs A' = 0";
    Ok(match constant {
        ZeroTest::Zero => {
            let mut out = CaseOutcome::known(&label, 1, why);
            out.generators.push(dx());
            out
        }
        ZeroTest::Nonzero => CaseOutcome::known(&label, 0, why),
        ZeroTest::Undecided => CaseOutcome {
            label,
            dimension: Dimension::AtMost { bound: 1 },
            verdict: Verdict::Indeterminate,
            justification: Justification::Computed("could not decide numerically whether A is constant".into()),
            generators: Vec::new(),
            conditions: Vec::new(),
            notes: Vec::new(),
        },
    })
}

const LINEAR_WHY: &str = "the equation is linear, so its point symmetry algebra is eight-dimensional for every A; \
explicit generators require the general solution of the linear equation";

fn classical_generators() -> Vec<VectorField> {
    [
        ("1", "0"),
        ("0", "1"),
        ("x", "0"),
        ("0", "x"),
        ("y", "0"),
        ("0", "y"),
        ("x^2", "x*y"),
        ("x*y", "y^2"),
    ]
    .iter()
    .map(|(xi, phi)| VectorField::parse(xi, phi).expect("fixed generator parses"))
    .collect()
}

fn linear_case(a: &Expr, cf: &CanonicalF, family: &AFamily, asm: &Assumptions) -> Result<CaseOutcome, ClassifyError> {
    let mut out = CaseOutcome::known("linear F", 8, LINEAR_WHY);
    let lambda = cf.lambda.clone().unwrap_or_else(Expr::zero);
    for name in [ConditionName::E7, ConditionName::E8] {
        let c = condition(name, &ConditionContext::lambda(lambda.clone())).expect("lambda supplied");
        out.conditions.push(ConditionReport {
            name: name.to_string(),
            expression: c.instantiate(a).to_string(),
            verdict: ConditionVerdict::NotEvaluated,
            residual: None,
        });
    }
    let a_zero = matches!(family, AFamily::Constant(m) if asm.is_zero(m)?);
    if a_zero && asm.is_zero(&cf.expr)? {
        out.generators = classical_generators();
    } else {
        out.notes.push(
            "no explicit generators: the remaining determining equations are linear ODEs in alpha(x) \
             whose solutions are not available in closed form for general A"
                .into(),
        );
    }
    Ok(out)
}

/// Evaluates a named condition on the grid of `x` values.
fn report_condition(name: ConditionName, ctx: &ConditionContext, a: &Expr, family: &AFamily) -> Result<ConditionReport, ClassifyError> {
    let c = condition(name, ctx).expect("context supplied by the caller");
    let e = c.instantiate(a);
    let (verdict, residual) = match engine::window_size(&e, family)? {
        Some((test, size)) => (ConditionVerdict::from(test), Some(size)),
        None => (ConditionVerdict::NotEvaluated, None),
    };
    Ok(ConditionReport {
        name: name.to_string(),
        expression: e.to_string(),
        verdict,
        residual,
    })
}

/// The two-dimensional cases are exactly those where the even-numbered
/// condition vanishes; a mismatch with the rank computation is flagged.
fn cross_check(out: &mut CaseOutcome, even: ConditionName) {
    let Some(report) = out.conditions.iter().find(|c| c.name == even.to_string()) else {
        return;
    };
    let two = match out.dimension {
        Dimension::Exact { value: d } => Some(d == 2),
        Dimension::Conditional { estimate: Some(d), .. } => Some(d == 2),
        _ => None,
    };
    let holds = match report.verdict {
        ConditionVerdict::Holds => Some(true),
        ConditionVerdict::Violated => Some(false),
        _ => None,
    };
    if let (Some(two), Some(holds)) = (two, holds) {
        if two != holds {
            out.notes.push(format!("{even} and the rank computation disagree about dimension two"));
        }
    }
}

/// Turns an engine result into dimension, verdict and generators.
fn from_engine(
    label: String,
    run: EngineOutcome,
    field: &FieldOf,
    a: &Expr,
    known: Option<KnownFamily>,
) -> CaseOutcome {
    let mut notes = Vec::new();
    let mut generators = Vec::new();
    let how = if run.closed_form {
        "closed-form candidate basis"
    } else {
        "numerical antiderivatives"
    };
    let detail = format!("rank of the condition on a {how} around x = {}: {}", run.window_center, run.detail);
    let (dimension, verdict, justification) = match (run.dim, run.closed_form, &known) {
        (None, _, _) => (Dimension::AtMost { bound: run.upper_bound }, Verdict::Indeterminate, Justification::Computed(detail)),
        (Some(d), true, _) => (Dimension::Exact { value: d }, Verdict::Definite, Justification::Computed(detail)),
        (Some(d), false, Some(c)) if c.dim == d => (
            Dimension::Exact { value: d },
            Verdict::Definite,
            Justification::Known(format!("{} has dimension {}; {detail}", c.name, c.dim)),
        ),
        (Some(d), false, known) => {
            if let Some(c) = known {
                notes.push(format!("{} should have dimension {} but the rank computation gives {d}", c.name, c.dim));
            }
            (
                Dimension::Conditional {
                    upper_bound: run.upper_bound,
                    estimate: Some(d),
                },
                Verdict::Conditional,
                Justification::Computed(detail),
            )
        }
    };
    if run.dim.is_some() {
        if run.closed_form {
            match engine::rational_kernel(&run.kernel) {
                Some(rows) => {
                    for row in rows {
                        let beta = Expr::add(
                            row.iter()
                                .zip(&run.basis)
                                .filter(|(q, _)| !q.is_zero())
                                .map(|(q, b)| Expr::from(*q) * b)
                                .collect(),
                        );
                        generators.push(field(&beta, a));
                    }
                }
                None => notes.push("null vectors are not small rationals; generators omitted".into()),
            }
        } else if let Some(beta) = &run.first_closed {
            let first_free = run
                .kernel
                .iter()
                .any(|v| v[0] != 0.0 && v[1..].iter().all(|c| *c == 0.0));
            if first_free {
                generators.push(field(beta, a));
            }
            if run.dim.unwrap_or(0) > generators.len() {
                notes.push("remaining generators involve antiderivatives without closed form; not listed".into());
            }
        } else if run.dim.unwrap_or(0) > 0 {
            notes.push("generators involve antiderivatives without closed form; not listed".into());
        }
    }
    CaseOutcome {
        label,
        dimension,
        verdict,
        justification,
        generators,
        conditions: Vec::new(),
        notes,
    }
}

fn quadratic_case(a: &Expr, cf: &CanonicalF, family: &AFamily, asm: &Assumptions) -> Result<CaseOutcome, ClassifyError> {
    let theta = cf.theta.clone().unwrap_or_else(Expr::zero);
    let th = theta.clone();
    // sigma = -2 beta', tau = A beta'' - beta'''.
    let residual: Residual = Box::new(move |b, a| {
        let tau = a * b.diff_n("x", 2) - b.diff_n("x", 3);
        Expr::int(-4) * &th * b.diff("x") - a * tau.diff("x") + tau.diff_n("x", 2)
    });
    let field: FieldOf = Box::new(|b, a| {
        let tau = a * b.diff_n("x", 2) - b.diff_n("x", 3);
        VectorField::new(b.clone(), Expr::int(-2) * b.diff("x") * Expr::sym("y") + tau)
    });
    let run = engine::solve(&Candidates::FirstOrder { c: Expr::rat(1, 5) }, a, family, &residual, asm)?;
    let label = if asm.is_zero(&theta)? {
        "quadratic F, theta = 0"
    } else {
        "quadratic F, theta != 0"
    };
    let mut out = from_engine(label.into(), run, &field, a, None);
    let ctx = ConditionContext::theta(theta);
    for name in [ConditionName::E1, ConditionName::E2] {
        out.conditions.push(report_condition(name, &ctx, a, family)?);
    }
    cross_check(&mut out, ConditionName::E2);
    Ok(out)
}

fn exp_field() -> FieldOf {
    Box::new(|b, _| VectorField::new(b.clone(), Expr::int(-2) * b.diff("x")))
}

fn exp_theta_zero(a: &Expr, family: &AFamily, asm: &Assumptions) -> Result<CaseOutcome, ClassifyError> {
    let residual: Residual = Box::new(|b, a| -(a * b).diff("x") - b.diff_n("x", 2));
    let run = engine::solve(&Candidates::ThirdOrder, a, family, &residual, asm)?;
    Ok(from_engine("exponential F, theta = 0".into(), run, &exp_field(), a, None))
}

fn exp_theta_nonzero(a: &Expr, cf: &CanonicalF, family: &AFamily, asm: &Assumptions) -> Result<CaseOutcome, ClassifyError> {
    let theta = cf.theta.clone().expect("tag carries theta");
    let th = theta.clone();
    let residual: Residual = Box::new(move |b, a| &th * b.diff("x") - a * b.diff_n("x", 2) + b.diff_n("x", 3));
    let run = engine::solve(&Candidates::FirstOrder { c: Expr::one() }, a, family, &residual, asm)?;
    let mut out = from_engine("exponential F, theta != 0".into(), run, &exp_field(), a, None);
    let ctx = ConditionContext::theta(theta);
    for name in [ConditionName::E3, ConditionName::E4] {
        out.conditions.push(report_condition(name, &ctx, a, family)?);
    }
    cross_check(&mut out, ConditionName::E4);
    Ok(out)
}

/// `theta = 0`: `beta = k1` constant and `sigma = k1 A / 2 + s0` with
/// `k1 G + 2 mu s0 = 0`, `G = A (mu + A') - A''`. Nontrivial solutions need
/// `G` constant, and then there is exactly one.
fn ylog_theta_zero(a: &Expr, cf: &CanonicalF, family: &AFamily) -> Result<CaseOutcome, ClassifyError> {
    let mu = cf.mu.clone().expect("tag carries mu");
    let g = (a * (&mu + a.diff("x")) - a.diff_n("x", 2)).expand();
    let label = "y ln y F, theta = 0".to_string();
    let bound_note = "the determining equations leave two constants (k1, s0) tied by one condition, \
                      so the true dimension is at most one although two constants appear";
    let y = Expr::sym("y");
    if !g.depends_on("x") {
        let sigma = a / Expr::int(2) - &g / (Expr::int(2) * &mu);
        let mut out = CaseOutcome {
            label,
            dimension: Dimension::Exact { value: 1 },
            verdict: Verdict::Definite,
            justification: Justification::Computed(format!("G = A (mu + A') - A'' = {g} is constant")),
            generators: vec![VectorField::new(Expr::one(), sigma * y)],
            conditions: Vec::new(),
            notes: vec![bound_note.to_string()],
        };
        out.conditions.push(ConditionReport {
            name: "G'".into(),
            expression: g.diff("x").to_string(),
            verdict: ConditionVerdict::Holds,
            residual: Some(0.0),
        });
        return Ok(out);
    }
    let test = engine::zero_on_window(&g.diff("x"), family)?;
    let estimate = match test {
        ZeroTest::Zero => Some(1),
        ZeroTest::Nonzero => Some(0),
        ZeroTest::Undecided => None,
    };
    Ok(CaseOutcome {
        label,
        dimension: Dimension::Conditional { upper_bound: 2, estimate },
        verdict: if estimate.is_some() {
            Verdict::Conditional
        } else {
            Verdict::Indeterminate
        },
        justification: Justification::Computed(format!("constancy of G = {g} tested numerically")),
        generators: Vec::new(),
        conditions: vec![ConditionReport {
            name: "G'".into(),
            expression: g.diff("x").to_string(),
            verdict: ConditionVerdict::from(test),
            residual: None,
        }],
        notes: vec![bound_note.to_string()],
    })
}

fn rational_of(e: &Expr, what: &str) -> Result<Rational, ClassifyError> {
    e.expand().as_rational().ok_or_else(|| ClassifyError::NeedsValue(vec![format!("{what} = {e}")]))
}

fn power_case(a: &Expr, cf: &CanonicalF, family: &AFamily, asm: &Assumptions) -> Result<CaseOutcome, ClassifyError> {
    let n_expr = cf.n.clone().expect("tag carries n");
    let n = rational_of(&n_expr, "n")?;
    let lambda = cf.lambda.clone().unwrap_or_else(Expr::zero);
    let nm1 = Expr::from(n - 1);
    let field: FieldOf = {
        let nm1 = nm1.clone();
        Box::new(move |b, _| {
            VectorField::new(b.clone(), Expr::int(-2) * b.diff("x") / &nm1 * Expr::sym("y"))
        })
    };
    let minus3 = n == Rational::from_integer(-3);
    if asm.is_zero(&lambda)? {
        let kappa = Expr::from((n + 3) / (n - 1));
        let residual: Residual = Box::new(move |b, a| -(a * b).diff("x") - &kappa * b.diff_n("x", 2));
        let run = engine::solve(&Candidates::ThirdOrder, a, family, &residual, asm)?;
        return Ok(from_engine(format!("power F, n = {n}, lambda = theta = 0"), run, &field, a, None));
    }
    if minus3 {
        let lam = lambda.clone();
        let residual: Residual =
            Box::new(move |b, a| Expr::int(-4) * &lam * b.diff("x") - a * b.diff_n("x", 2) + b.diff_n("x", 3));
        let run = engine::solve(&Candidates::InverseA { lambda: lambda.clone() }, a, family, &residual, asm)?;
        return Ok(from_engine("power F, n = -3, lambda != 0".into(), run, &field, a, None));
    }
    let lam = lambda.clone();
    let nm1r = nm1.clone();
    let residual: Residual =
        Box::new(move |b, a| &nm1r * &lam * b.diff("x") - a * b.diff_n("x", 2) + b.diff_n("x", 3));
    let c = Expr::from((n - 1) / (n + 3));
    let known = known_power_family(n, &lambda, family, asm)?;
    let run = engine::solve(&Candidates::FirstOrder { c }, a, family, &residual, asm)?;
    let mut out = from_engine(format!("power F, n = {n}, lambda != 0"), run, &field, a, known);
    let ctx = ConditionContext::power(n_expr, lambda);
    for name in [ConditionName::E5, ConditionName::E6] {
        out.conditions.push(report_condition(name, &ctx, a, family)?);
    }
    cross_check(&mut out, ConditionName::E6);
    Ok(out)
}

/// The two-dimensional families known for `lambda != 0`: `A = lambda x + m`
/// when `n = -1`, and `A = C tan(a x + b)` with `C (1 + n) = (3 + n) a`,
/// `2 a^2 = lambda (1 + n)` otherwise.
fn known_power_family(n: Rational, lambda: &Expr, family: &AFamily, asm: &Assumptions) -> Result<Option<KnownFamily>, ClassifyError> {
    let minus1 = n == Rational::from_integer(-1);
    let ne = Expr::from(n);
    let hit = match family {
        AFamily::Affine { slope, .. } if minus1 => asm.is_zero(&(slope - lambda))?,
        AFamily::Tan { c, a, .. } if !minus1 => {
            asm.is_zero(&(c * (Expr::one() + &ne) - (Expr::int(3) + &ne) * a))?
                && asm.is_zero(&(Expr::int(2) * a * a - lambda * (Expr::one() + &ne)))?
        }
        _ => false,
    };
    Ok(hit.then(|| KnownFamily {
        dim: 2,
        name: if minus1 {
            "the affine family A = lambda x + m".into()
        } else {
            "the tan family".into()
        },
    }))
}
