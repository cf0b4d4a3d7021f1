//! Concrete instances of the classification table, with the
//! expected dimension and the generators the table prints.
//!
//! Rows whose `A` is only characterized by a differential condition are
//! listed as skipped, as is the row whose `A` is complex for real `theta`.

use crate::classifier::{classify, ClassificationResult, ClassifyError, ClassifyOptions, Dimension, Verdict};
use crate::detsys::{field_residual, GridSpec, VectorField};
use crate::expr::parse;
use crate::expr::shape::Assumptions;
use crate::verifier::RESIDUAL_TOL;

/// One concrete `(F, A)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TableCase {
    /// Row key used by `--row`, e.g. `"y^-1"`.
    pub row: &'static str,
    pub a: String,
    pub f: String,
    /// How the placeholders were instantiated.
    pub instance: String,
    pub expected: usize,
    /// Generators printed in the table, as `(xi, phi)`.
    pub generators: Vec<(String, String)>,
}

/// A row without a concrete instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRow {
    pub row: &'static str,
    pub a: &'static str,
    pub reason: &'static str,
}

fn case(row: &'static str, a: &str, f: &str, instance: &str, expected: usize, gens: &[(&str, &str)]) -> TableCase {
    TableCase {
        row,
        a: a.into(),
        f: f.into(),
        instance: instance.into(),
        expected,
        generators: gens.iter().map(|(x, p)| (x.to_string(), p.to_string())).collect(),
    }
}

pub fn table_cases() -> Vec<TableCase> {
    let mut out = Vec::new();
    let exp = "mu*exp(y)";
    for mu in ["1", "-2"] {
        out.push(case(exp, "0", &format!("{mu}*exp(y)").replace("1*", ""), &format!("mu = {mu}"), 2, &[("1", "0"), ("x", "-2")]));
    }
    for mu in ["1", "3"] {
        out.push(case(exp, "-1/x", &format!("{mu}*exp(y)").replace("1*", ""), &format!("mu = {mu}"), 2, &[]));
    }
    for m in ["3", "-2"] {
        out.push(case(exp, &format!("{m}/x"), "exp(y)", &format!("M = {m}, mu = 1"), 1, &[("x", "-2")]));
    }

    // sqrt(theta/2) tan(sqrt(theta/2) (x + 2m)) at theta = 2, 8.
    let exp_theta = "mu*exp(y)+theta";
    out.push(case(exp_theta, "tan(x)", "exp(y) + 2", "theta = 2, m = 0, mu = 1", 2, &[]));
    out.push(case(exp_theta, "2*tan(2*x + 2/5)", "exp(y) + 8", "theta = 8, m = 1/10, mu = 1", 2, &[]));

    // The table leaves this row at "1 or 2"; constant A is the one
    // instance with a definite answer.
    let ylog = "mu*y*ln(y)";
    out.push(case(ylog, "2", "y*ln(y)", "A = 2, mu = 1", 1, &[("1", "0")]));
    out.push(case(ylog, "-3", "2*y*ln(y)", "A = -3, mu = 2", 1, &[("1", "0")]));

    let sq = "y^2";
    out.push(case(sq, "0", "y^2", "p = 0", 2, &[]));
    for p in ["-15", "-10/3", "-5/3"] {
        for m in ["1/2", "2"] {
            out.push(case(sq, &format!("({p})/(x + {m})"), "y^2", &format!("p = {p}, m = {m}"), 2, &[]));
        }
    }

    let inv = "y^-1";
    for m in ["2", "-3"] {
        out.push(case(inv, m, "y^(-1)", &format!("M = {m}"), 2, &[]));
    }
    for m in ["2", "-1"] {
        out.push(case(inv, &format!("{m}/x"), "y^(-1)", &format!("M = {m}"), 1, &[("x", "y")]));
    }

    let cube = "y^-3";
    out.push(case(cube, "0", "y^(-3)", "", 3, &[]));
    for m in ["3", "-1"] {
        out.push(case(cube, &format!("{m}/x"), "y^(-3)", &format!("M = {m}"), 1, &[("2*x", "y")]));
    }

    // The table prints (k2 + k1 x) dx - 2 k1/(n - 1) dy here; only the
    // scaling x dx - 2y/(n - 1) dy is a symmetry once A is not constant.
    let pow = "y^n";
    for (n, crit) in [("3", "-(3/2)/x"), ("5", "-(4/3)/x")] {
        let f = format!("y^{n}");
        let scaling = [("x", &*format!("-2*y/({n} - 1)"))];
        out.push(case(pow, crit, &f, &format!("n = {n}"), 2, &scaling));
        out.push(case(pow, "0", &f, &format!("n = {n}"), 2, &[("1", "0")]));
        for m in ["1", "-1"] {
            let gen = [(&*format!("({n} - 1)*x"), "-2*y")];
            out.push(case(pow, &format!("{m}/x"), &f, &format!("n = {n}, M = {m}"), 1, &gen));
        }
    }

    let inv_lin = "y^-1+lambda*y";
    out.push(case(inv_lin, "x", "y^(-1) + y", "lambda = 1, m = 0", 2, &[]));
    out.push(case(inv_lin, "-2*x + 1/2", "y^(-1) - 2*y", "lambda = -2, m = 1/2", 2, &[]));

    let cube_lin = "y^-3+lambda*y";
    out.push(case(cube_lin, "0", "y^(-3) + y", "lambda = 1", 3, &[]));
    out.push(case(cube_lin, "0", "y^(-3) - y", "lambda = -1", 3, &[]));

    // (3+n) sqrt(lambda)/sqrt(2(1+n)) tan(sqrt(lambda(n+1)) (x + 2(3+n)m)/sqrt(2))
    // with lambda (n + 1) = 2.
    let pow_lin = "y^n+lambda*y";
    for (n, l, coeff, shift) in [("3", "1/2", "3/2", "3/5"), ("5", "1/3", "4/3", "4/5")] {
        let f = format!("y^{n} + ({l})*y");
        out.push(case(pow_lin, &format!("({coeff})*tan(x)"), &f, &format!("n = {n}, lambda = {l}, m = 0"), 2, &[]));
        let a = format!("({coeff})*tan(x + {shift})");
        out.push(case(pow_lin, &a, &f, &format!("n = {n}, lambda = {l}, m = 1/20"), 2, &[]));
    }

    let generic = "ln(y)+y";
    for m in ["2", "-1"] {
        out.push(case(generic, m, "ln(y) + y", &format!("M = {m}"), 1, &[("1", "0")]));
    }

    let linear = "linear";
    out.push(case(linear, "0", "0", "A = 0, F = 0", 8, &[]));
    out.push(case(linear, "2", "3*y", "A = 2, F = 3y", 8, &[]));
    out.push(case(linear, "sin(x)", "2*y - 1", "A = sin(x), F = 2y - 1", 8, &[]));
    out
}

pub fn skipped_rows() -> Vec<SkippedRow> {
    const CONDITION: &str = "A is defined only by a differential condition";
    let row = |row, a, reason| SkippedRow { row, a, reason };
    vec![
        row("mu*exp(y)+theta", "dimension-one condition", CONDITION),
        row("y^2", "E2 = 0 and the dimension-one condition", CONDITION),
        row("y^2+theta", "5 (sqrt(theta) i/3)^(1/2) tan(...)", "A is complex for real theta"),
        row("y^2+theta", "E2 = 0 and the dimension-one condition", CONDITION),
        row("y^-3", "dimension-one condition with n = -3", CONDITION),
        row("y^n", "dimension-one condition", CONDITION),
        row("y^-1+lambda*y", "dimension-one condition with n = -1", CONDITION),
        row("y^-3+lambda*y", "dimension-one condition", CONDITION),
        row("y^n+lambda*y", "dimension-one condition", CONDITION),
    ]
}

/// Row keys in table order.
pub fn row_keys() -> Vec<&'static str> {
    let mut keys: Vec<&'static str> = Vec::new();
    for c in table_cases() {
        if !keys.contains(&c.row) {
            keys.push(c.row);
        }
    }
    for s in skipped_rows() {
        if !keys.contains(&s.row) {
            keys.push(s.row);
        }
    }
    keys
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub case: TableCase,
    pub outcome: Result<ClassificationResult, ClassifyError>,
    /// Residuals of the table's own generators.
    pub table_generators: Vec<(VectorField, Result<f64, String>)>,
    /// Empty when the case passes.
    pub failures: Vec<String>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_case(case: &TableCase, grid: &GridSpec) -> CaseResult {
    let mut failures = Vec::new();
    let (a, f) = match (parse(&case.a), parse(&case.f)) {
        (Ok(a), Ok(f)) => (a, f),
        (a, f) => {
            return CaseResult {
                case: case.clone(),
                outcome: Err(ClassifyError::InvalidInput(format!("unparsable instance: {a:?} {f:?}"))),
                table_generators: Vec::new(),
                failures: vec!["instance does not parse".into()],
            }
        }
    };
    let opts = ClassifyOptions {
        verify: true,
        grid: *grid,
    };
    let outcome = classify(&a, &f, &Assumptions::new(), &opts);
    match &outcome {
        Ok(r) => {
            if r.dimension != (Dimension::Exact { value: case.expected }) {
                failures.push(format!("dimension {} (expected {})", r.dimension, case.expected));
            }
            if r.verdict != Verdict::Definite {
                failures.push(format!("verdict {}", r.verdict));
            }
            if r.generators.len() > case.expected {
                failures.push(format!("{} generators for dimension {}", r.generators.len(), case.expected));
            }
            for g in &r.generators {
                match g.residual {
                    Some(res) if res < RESIDUAL_TOL => {}
                    Some(res) => failures.push(format!("generator {} residual {res:.2e}", g.field)),
                    None => failures.push(format!("generator {} not verified", g.field)),
                }
            }
        }
        Err(e) => failures.push(format!("classification failed: {e}")),
    }
    let mut table_generators = Vec::new();
    for (xi, phi) in &case.generators {
        let field = match VectorField::parse(xi, phi) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("table generator ({xi}, {phi}) does not parse: {e}"));
                continue;
            }
        };
        let res = field_residual(&a, &f, &field, grid).map_err(|e| e.to_string());
        match &res {
            Ok(r) if *r < RESIDUAL_TOL => {}
            Ok(r) => failures.push(format!("table generator {field} residual {r:.2e}")),
            Err(e) => failures.push(format!("table generator {field}: {e}")),
        }
        table_generators.push((field, res));
    }
    CaseResult {
        case: case.clone(),
        outcome,
        table_generators,
        failures,
    }
}

/// Runs every case whose row key matches `row` (all when `None`).
pub fn run_table(row: Option<&str>, grid: &GridSpec) -> Vec<CaseResult> {
    table_cases()
        .iter()
        .filter(|c| row.is_none_or(|r| r == c.row))
        .map(|c| run_case(c, grid))
        .collect()
}
