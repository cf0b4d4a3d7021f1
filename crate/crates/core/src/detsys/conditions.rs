use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConditionName {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    E8,
}

impl ConditionName {
    pub const ALL: [ConditionName; 8] = [
        ConditionName::E1,
        ConditionName::E2,
        ConditionName::E3,
        ConditionName::E4,
        ConditionName::E5,
        ConditionName::E6,
        ConditionName::E7,
        ConditionName::E8,
    ];

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.to_string().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for ConditionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Constants some of the conditions depend on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConditionContext {
    pub theta: Option<Expr>,
    pub lambda: Option<Expr>,
    pub n: Option<Expr>,
}

impl ConditionContext {
    pub fn theta(theta: Expr) -> Self {
        Self {
            theta: Some(theta),
            ..Self::default()
        }
    }

    pub fn power(n: Expr, lambda: Expr) -> Self {
        Self {
            n: Some(n),
            lambda: Some(lambda),
            ..Self::default()
        }
    }

    pub fn lambda(lambda: Expr) -> Self {
        Self {
            lambda: Some(lambda),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConditionError {
    #[error("condition {name} needs the constant `{param}`")]
    MissingContext { name: ConditionName, param: &'static str },
}

/// A compatibility expression in the unknown coefficient `A(x)` (and, for
/// E7 and E8, the unknown `alpha(x)`).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionExpr {
    pub name: ConditionName,
    pub expr: Expr,
}

impl ConditionExpr {
    /// Replaces `A` and its derivatives by a concrete coefficient.
    pub fn instantiate(&self, a: &Expr) -> Expr {
        self.expr.instantiate("A", a)
    }
}

/// Builds the named compatibility expression.
pub fn condition(name: ConditionName, ctx: &ConditionContext) -> Result<ConditionExpr, ConditionError> {
    let need = |v: &Option<Expr>, param| {
        v.clone().ok_or(ConditionError::MissingContext { name, param })
    };
    let a = |k| Expr::opaque("A", "x", k);
    let al = |k| Expr::opaque("alpha", "x", k);
    let i = Expr::int;
    let expr = match name {
        ConditionName::E1 => {
            let th = need(&ctx.theta, "theta")?;
            i(36) * a(0).powi(5) - i(900) * a(0).powi(3) * a(1) + i(2000) * a(0).powi(2) * a(2)
                + i(625) * a(0) * (i(4) * (a(1).powi(2) + &th) - i(3) * a(3))
                + i(625) * (i(-5) * a(1) * a(2) + a(4))
        }
        ConditionName::E2 => {
            let th = need(&ctx.theta, "theta")?;
            i(9) * a(0).powi(4) - i(180) * a(0).powi(2) * a(1) + i(275) * a(0) * a(2)
                + i(25) * (i(7) * a(1).powi(2) + i(25) * th - i(5) * a(3))
        }
        ConditionName::E3 => {
            let th = need(&ctx.theta, "theta")?;
            i(2) * a(0).powi(3) + a(0) * (th - i(4) * a(1)) + a(2)
        }
        ConditionName::E4 => {
            let th = need(&ctx.theta, "theta")?;
            th + i(2) * a(0).powi(2) - i(2) * a(1)
        }
        ConditionName::E5 => {
            let n = need(&ctx.n, "n")?;
            let lam = need(&ctx.lambda, "lambda")?;
            let n3 = &n + i(3);
            i(2) * a(0).powi(3) * (&n * &n - i(1))
                + a(0) * &n3 * ((&n - i(1)) * &n3 * &lam - i(4) * &n * a(1))
                + &n3 * &n3 * a(2)
        }
        ConditionName::E6 => {
            let n = need(&ctx.n, "n")?;
            let lam = need(&ctx.lambda, "lambda")?;
            let n3 = &n + i(3);
            i(-2) * a(0).powi(2) * (i(1) + &n) + &n3 * (-(&n3 * lam) + i(2) * a(1))
        }
        ConditionName::E7 => {
            let lam = need(&ctx.lambda, "lambda")?;
            // The A' alpha' coefficient is 2: the identity E7 = E8' - A E8
            // requires it.
            a(0) * al(0) * &lam - a(0) * al(0) * a(1) - a(0).powi(2) * al(1)
                + (-(&lam) + i(2) * a(1)) * al(1)
                + al(0) * a(2)
                + al(3)
        }
        ConditionName::E8 => {
            let lam = need(&ctx.lambda, "lambda")?;
            al(0) * (-lam + a(1)) + a(0) * al(1) + al(2)
        }
    };
    Ok(ConditionExpr { name, expr })
}
