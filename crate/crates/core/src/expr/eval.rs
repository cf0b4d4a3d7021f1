use std::sync::Arc;

use thiserror::Error;

use super::{rational_to_f64, Expr, Func, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("unknown function `{0}` must be instantiated before evaluation")]
    Opaque(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Symbol values for numerical evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings {
    values: Vec<(Symbol, f64)>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        match self.values.iter_mut().find(|(n, _)| &**n == name) {
            Some(slot) => slot.1 = value,
            None => self.values.push((Arc::from(name), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|(n, _)| &**n == name)
            .map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(n, v)| (&**n, *v))
    }
}

impl Expr {
    /// IEEE double value of the expression. Fails on unbound symbols and on
    /// points outside the real domain (log of a non-positive number, even
    /// roots of negatives, poles).
    pub fn eval(&self, b: &Bindings) -> Result<f64, EvalError> {
        let v = self.eval_inner(b)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Domain(format!("non-finite value in `{self}`")))
        }
    }

    fn eval_inner(&self, b: &Bindings) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(q) => rational_to_f64(q),
            Expr::Pi => std::f64::consts::PI,
            Expr::Sym(s) => b.get(s).ok_or_else(|| EvalError::Unbound(s.to_string()))?,
            Expr::Opaque { name, .. } => return Err(EvalError::Opaque(name.to_string())),
            Expr::Add(xs) => {
                let mut acc = 0.0;
                for x in xs {
                    acc += x.eval_inner(b)?;
                }
                acc
            }
            Expr::Mul(xs) => {
                let mut acc = 1.0;
                for x in xs {
                    acc *= x.eval_inner(b)?;
                }
                acc
            }
            Expr::Pow(base, e) => {
                let bv = base.eval_inner(b)?;
                real_pow(bv, e, b)?
            }
            Expr::Call(f, a) => {
                let a = a.eval_inner(b)?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(EvalError::Domain(format!("ln({a})")));
                        }
                        a.ln()
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                }
            }
        })
    }
}

fn real_pow(base: f64, exponent: &Expr, b: &Bindings) -> Result<f64, EvalError> {
    if let Some(q) = exponent.as_rational() {
        let (p, d) = (*q.numer(), *q.denom());
        if base == 0.0 && p < 0 {
            return Err(EvalError::Domain("zero raised to a negative power".into()));
        }
        if d == 1 {
            return Ok(match i32::try_from(p) {
                Ok(k) => base.powi(k),
                Err(_) => base.powf(p as f64),
            });
        }
        if base < 0.0 {
            if d % 2 == 0 {
                return Err(EvalError::Domain(format!("even root of {base}")));
            }
            let mag = (-base).powf(p as f64 / d as f64);
            return Ok(if p % 2 == 0 { mag } else { -mag });
        }
        if d == 2 && p == 1 {
            return Ok(base.sqrt());
        }
        return Ok(base.powf(p as f64 / d as f64));
    }
    let e = exponent.eval_inner(b)?;
    if base < 0.0 {
        if e.fract() == 0.0 {
            return Ok(base.powf(e));
        }
        return Err(EvalError::Domain(format!("{base}^{e}")));
    }
    if base == 0.0 && e < 0.0 {
        return Err(EvalError::Domain("zero raised to a negative power".into()));
    }
    Ok(base.powf(e))
}
