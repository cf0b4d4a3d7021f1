//! Symmetry classification of `y'' = A(x) y' + F(y)`.
//!
//! `F` is first brought to canonical form by an equivalence map acting on
//! `y` only. The case analysis then runs in canonical coordinates, where
//! every symmetry of a nonlinear equation has the form
//! `beta(x) d/dx + (y sigma(x) + tau(x)) d/dy`, and the generators found
//! there are pushed back and checked against the original equation.

mod cases;
mod engine;
mod family;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::detsys::{field_residual, GridSpec, VectorField};
use crate::equivalence::{canonicalize_f, CanonicalF};
use crate::expr::shape::{Ambiguous, Assumptions};
use crate::expr::{Expr, Rational};

pub use engine::{rank_analysis, rational_kernel, relative_size, zero_test, Column, ZeroTest, NONZERO_TOL, ZERO_TOL};
pub use family::{recognize, AFamily};

/// A generator is accepted when every determining equation stays below
/// this on the sample grid.
pub const GENERATOR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Ambiguous(#[from] Ambiguous),
    #[error("the classification needs numeric values for: {}", .0.join(", "))]
    NeedsValue(Vec<String>),
    #[error("parameters without a declared value or zero status: {}", .0.join(", "))]
    Undeclared(Vec<String>),
    #[error("{0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Dimension {
    Exact { value: usize },
    /// Only an upper bound is known.
    AtMost { bound: usize },
    /// The dimension rests on a numerical test outside any family with a
    /// known answer.
    Conditional { upper_bound: usize, estimate: Option<usize> },
}

impl Dimension {
    /// The exact value, or the numerical estimate.
    pub fn best(&self) -> Option<usize> {
        match *self {
            Dimension::Exact { value } => Some(value),
            Dimension::Conditional { estimate, .. } => estimate,
            Dimension::AtMost { .. } => None,
        }
    }

    pub fn exact(&self) -> Option<usize> {
        match *self {
            Dimension::Exact { value } => Some(value),
            _ => None,
        }
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dimension::Exact { value } => write!(f, "{value}"),
            Dimension::AtMost { bound } => write!(f, "<= {bound}"),
            Dimension::Conditional {
                upper_bound,
                estimate: Some(e),
            } => write!(f, "{e} (numerical, <= {upper_bound})"),
            Dimension::Conditional { upper_bound, estimate: None } => write!(f, "<= {upper_bound}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Definite,
    Conditional,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Definite => "DEFINITE",
            Verdict::Conditional => "CONDITIONAL",
            Verdict::Indeterminate => "INDETERMINATE",
        })
    }
}

/// Why the dimension is what it is.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "reason")]
pub enum Justification {
    /// Established result, not recomputed here.
    Known(String),
    /// Decided by a computation in this run.
    Computed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionVerdict {
    Holds,
    Violated,
    Indeterminate,
    NotEvaluated,
}

impl From<ZeroTest> for ConditionVerdict {
    fn from(t: ZeroTest) -> Self {
        match t {
            ZeroTest::Zero => ConditionVerdict::Holds,
            ZeroTest::Nonzero => ConditionVerdict::Violated,
            ZeroTest::Undecided => ConditionVerdict::Indeterminate,
        }
    }
}

/// A condition on `A` with its numerical verdict. `residual` is the
/// relative size of the instantiated expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub name: String,
    pub expression: String,
    pub verdict: ConditionVerdict,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    /// In the coordinates of the input equation.
    pub field: VectorField,
    /// In the coordinates of the canonical equation.
    pub canonical: VectorField,
    /// Largest determining-equation residual on the grid.
    pub residual: Option<f64>,
}

impl Generator {
    pub fn verified(&self) -> Option<bool> {
        self.residual.map(|r| r < GENERATOR_TOL)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub a: Expr,
    pub f: Expr,
    pub canonical: CanonicalF,
    pub family: AFamily,
    pub case_label: String,
    pub dimension: Dimension,
    pub verdict: Verdict,
    pub justification: Justification,
    pub generators: Vec<Generator>,
    pub conditions: Vec<ConditionReport>,
    pub notes: Vec<String>,
}

impl ClassificationResult {
    /// Every generator that was checked passed.
    pub fn generators_verified(&self) -> bool {
        self.generators.iter().all(|g| g.verified() != Some(false))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    /// Check every generator against the original equation.
    pub verify: bool,
    pub grid: GridSpec,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            verify: true,
            grid: GridSpec::default(),
        }
    }
}

fn parameters(e: &Expr, var: &str) -> Vec<String> {
    e.free_symbols().iter().filter(|s| &***s != var).map(|s| s.to_string()).collect()
}

fn validate(a: &Expr, f: &Expr, asm: &Assumptions) -> Result<(), ClassifyError> {
    if a.depends_on("y") {
        return Err(ClassifyError::InvalidInput("A may depend on x only".into()));
    }
    if f.depends_on("x") {
        return Err(ClassifyError::InvalidInput("F may depend on y only".into()));
    }
    if !a.opaque_functions().is_empty() || !f.opaque_functions().is_empty() {
        return Err(ClassifyError::InvalidInput("A and F must be explicit expressions".into()));
    }
    let mut undeclared: Vec<String> = parameters(a, "x")
        .into_iter()
        .chain(parameters(f, "y"))
        .filter(|p| !asm.is_declared_nonzero(p))
        .collect();
    undeclared.sort();
    undeclared.dedup();
    if undeclared.is_empty() {
        Ok(())
    } else {
        Err(ClassifyError::Undeclared(undeclared))
    }
}

/// Scales a field so its rational coefficients are coprime integers and
/// the first one is positive.
pub fn tidy(v: &VectorField) -> VectorField {
    let v = VectorField::new(v.xi.expand(), v.phi.expand());
    let coeffs: Vec<Rational> = [&v.xi, &v.phi]
        .iter()
        .filter(|e| !e.is_zero())
        .flat_map(|e| e.terms())
        .map(|t| t.split_coeff().0)
        .filter(|q| !q.is_zero())
        .collect();
    let Some(first) = coeffs.first() else { return v };
    let den = coeffs.iter().fold(1i64, |l, q| l.lcm(q.denom()));
    let num = coeffs.iter().fold(0i64, |g, q| g.gcd(q.numer()));
    let mut factor = Rational::new(den, num.max(1));
    if first.is_negative() {
        factor = -factor;
    }
    let s = v.scale(&Expr::from(factor));
    VectorField::new(s.xi.expand(), s.phi.expand())
}

/// Classifies the equation, assuming the parameters of `asm` nonzero. Any
/// other parameter must already have been replaced by a number.
pub fn classify(a: &Expr, f: &Expr, asm: &Assumptions, opts: &ClassifyOptions) -> Result<ClassificationResult, ClassifyError> {
    validate(a, f, asm)?;
    let canonical = canonicalize_f(f, asm)?;
    let family = recognize(a, asm)?;
    let rebuilt = family.rebuild().unwrap_or_else(|| a.clone());
    let case = cases::analyse(&rebuilt, &canonical, &family, asm)?;
    let mut notes = case.notes;
    let symbolic = !parameters(a, "x").is_empty() || !parameters(f, "y").is_empty();
    if opts.verify && symbolic {
        notes.push("generators not verified numerically: symbolic parameters remain".into());
    }
    let mut generators = Vec::new();
    for g in &case.generators {
        let canonical_field = tidy(g);
        let field = tidy(&canonical_field.pushforward(&canonical.witness));
        let residual = if opts.verify && !symbolic {
            match field_residual(a, f, &field, &opts.grid) {
                Ok(r) => Some(r),
                Err(e) => {
                    notes.push(format!("generator {field} not verified: {e}"));
                    None
                }
            }
        } else {
            None
        };
        if let Some(r) = residual.filter(|r| !(*r < GENERATOR_TOL)) {
            notes.push(format!("generator {field} fails verification (residual {r:.3e})"));
        }
        generators.push(Generator {
            field,
            canonical: canonical_field,
            residual,
        });
    }
    Ok(ClassificationResult {
        a: a.clone(),
        f: f.clone(),
        canonical,
        family,
        case_label: case.label,
        dimension: case.dimension,
        verdict: case.verdict,
        justification: case.justification,
        generators,
        conditions: case.conditions,
        notes,
    })
}
