//! Structural recognition of the admissible right-hand sides `F(y)`.
//!
//! Matching works on the normal form and reads coefficients off exactly.
//! Decisions that depend on whether a symbolic coefficient vanishes go
//! through [`Assumptions`], which fails with [`Ambiguous`] instead of
//! guessing.

use std::collections::BTreeSet;

use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use super::{Expr, Func, Symbol};

/// Zero status of a parameter or constant expression could not be decided.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot decide whether `{expr}` vanishes; give a numeric value for: {}", .params.join(", "))]
pub struct Ambiguous {
    pub expr: String,
    pub params: Vec<String>,
}

/// Caller-declared facts about symbolic parameters. Parameters declared
/// zero or given a value are substituted before matching, so only the
/// nonzero declarations need to be carried here.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assumptions {
    nonzero: BTreeSet<Symbol>,
}

impl Assumptions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_nonzero(&mut self, name: &str) {
        self.nonzero.insert(Symbol::from(name));
    }

    pub fn is_declared_nonzero(&self, name: &str) -> bool {
        self.nonzero.iter().any(|s| &**s == name)
    }

    fn structurally_nonzero(&self, e: &Expr) -> bool {
        match e {
            Expr::Num(q) => *q.numer() != 0,
            Expr::Pi => true,
            Expr::Sym(s) => self.nonzero.contains(s),
            Expr::Mul(xs) => xs.iter().all(|x| self.structurally_nonzero(x)),
            Expr::Pow(b, _) => self.structurally_nonzero(b),
            Expr::Call(Func::Exp, _) => true,
            _ => false,
        }
    }

    /// Decides `e == 0` for an expression free of variables.
    pub fn is_zero(&self, e: &Expr) -> Result<bool, Ambiguous> {
        let e = e.expand();
        if let Expr::Num(q) = e {
            return Ok(*q.numer() == 0);
        }
        if self.structurally_nonzero(&e) {
            return Ok(false);
        }
        if e.is_constant() {
            if let Some(v) = e.const_value() {
                return Ok(v.abs() <= 1e-12);
            }
        }
        Err(self.ambiguous(&e))
    }

    /// Sign of a constant expression: numeric evaluation when possible.
    pub fn sign(&self, e: &Expr) -> Result<i8, Ambiguous> {
        if self.is_zero(e)? {
            return Ok(0);
        }
        match e.const_value() {
            Some(v) if v > 0.0 => Ok(1),
            Some(_) => Ok(-1),
            None => Err(self.ambiguous(e)),
        }
    }

    fn ambiguous(&self, e: &Expr) -> Ambiguous {
        Ambiguous {
            expr: e.to_string(),
            params: e.free_symbols().iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Coefficients `[c0, c1, ...]` of `e` as a polynomial in `var`, or `None`
/// if `var` occurs other than through non-negative integer powers.
/// Trailing structurally-zero coefficients are dropped.
pub fn poly_coeffs(e: &Expr, var: &str) -> Option<Vec<Expr>> {
    let mut out: Vec<Vec<Expr>> = Vec::new();
    for t in e.expand().terms() {
        let factors = match &t {
            Expr::Mul(xs) => xs.clone(),
            other => vec![other.clone()],
        };
        let mut degree = 0usize;
        let mut rest = Vec::new();
        for f in factors {
            if !f.depends_on(var) {
                rest.push(f);
                continue;
            }
            let k = match &f {
                Expr::Sym(s) if &**s == var => 1,
                Expr::Pow(b, k) if matches!(&**b, Expr::Sym(s) if &**s == var) => {
                    let q = k.as_rational()?;
                    if !q.is_integer() || q.is_negative() {
                        return None;
                    }
                    q.to_integer().to_usize()?
                }
                _ => return None,
            };
            degree += k;
        }
        if out.len() <= degree {
            out.resize(degree + 1, Vec::new());
        }
        out[degree].push(Expr::mul(rest));
    }
    let mut coeffs: Vec<Expr> = out.into_iter().map(Expr::add).collect();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    Some(coeffs)
}

/// Recognized shapes of `F(y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `r (a y + b)^n + c y + s`
    Power {
        r: Expr,
        a: Expr,
        b: Expr,
        n: Expr,
        c: Expr,
        s: Expr,
    },
    /// `r e^(a y) + b y + c`
    Exp { r: Expr, a: Expr, b: Expr, c: Expr },
    /// `a ln(y) + b y + c`
    Log { a: Expr, b: Expr, c: Expr },
    /// `a y ln(y) + b y + c`
    YLog { a: Expr, b: Expr, c: Expr },
    /// `a y^2 + b y + c`
    Quadratic { a: Expr, b: Expr, c: Expr },
    /// `c y + b`
    Linear { c: Expr, b: Expr },
    Unrecognized,
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::Power { .. } => "power",
            Shape::Exp { .. } => "exponential",
            Shape::Log { .. } => "logarithmic",
            Shape::YLog { .. } => "y-logarithmic",
            Shape::Quadratic { .. } => "quadratic",
            Shape::Linear { .. } => "linear",
            Shape::Unrecognized => "unrecognized",
        }
    }

    /// The expression the shape stands for, in the variable `var`.
    pub fn reconstruct(&self, var: &str) -> Option<Expr> {
        let y = Expr::sym(var);
        Some(match self {
            Shape::Power { r, a, b, n, c, s } => {
                r * Expr::pow(a * &y + b, n.clone()) + c * &y + s
            }
            Shape::Exp { r, a, b, c } => r * (a * &y).exp() + b * &y + c,
            Shape::Log { a, b, c } => a * y.clone().ln() + b * &y + c,
            Shape::YLog { a, b, c } => a * &y * y.clone().ln() + b * &y + c,
            Shape::Quadratic { a, b, c } => a * y.clone().powi(2) + b * &y + c,
            Shape::Linear { c, b } => c * &y + b,
            Shape::Unrecognized => return None,
        })
    }
}

enum Special {
    Power { r: Expr, a: Expr, b: Expr, n: Expr },
    Exp { r: Expr, a: Expr },
    Log { a: Expr },
    YLog { a: Expr },
}

enum Term {
    Const(Expr),
    Lin(Expr),
    Special(Special),
    Other,
}

/// `(slope, intercept)` if `e` is affine in `var` with nonzero slope.
fn affine(e: &Expr, var: &str) -> Option<(Expr, Expr)> {
    let c = poly_coeffs(e, var)?;
    (c.len() == 2).then(|| (c[1].clone(), c[0].clone()))
}

fn classify_term(t: &Expr, var: &str) -> Term {
    let factors = match t {
        Expr::Mul(xs) => xs.clone(),
        other => vec![other.clone()],
    };
    let (dep, indep): (Vec<Expr>, Vec<Expr>) = factors.into_iter().partition(|f| f.depends_on(var));
    let k = Expr::mul(indep);
    let is_var = |e: &Expr| matches!(e, Expr::Sym(s) if &**s == var);
    // ln(a y) = ln(a) + ln(y); the constant part is returned through the
    // intercept of the special term.
    let log_scale = |arg: &Expr| -> Option<Expr> {
        let c = poly_coeffs(arg, var)?;
        (c.len() == 2 && c[0].is_zero()).then(|| c[1].clone())
    };
    match dep.as_slice() {
        [] => Term::Const(k),
        [v] if is_var(v) => Term::Lin(k),
        [Expr::Pow(base, n)] if !n.depends_on(var) => match affine(base, var) {
            Some((a, b)) => Term::Special(Special::Power { r: k, a, b, n: (**n).clone() }),
            None => Term::Other,
        },
        [Expr::Call(Func::Exp, arg)] => match affine(arg, var) {
            Some((a, d)) => Term::Special(Special::Exp { r: k * d.exp(), a }),
            None => Term::Other,
        },
        [Expr::Call(Func::Ln, arg)] => match log_scale(arg) {
            Some(sc) if sc.is_one() => Term::Special(Special::Log { a: k }),
            _ => Term::Other,
        },
        [v, Expr::Call(Func::Ln, arg)] | [Expr::Call(Func::Ln, arg), v] if is_var(v) => {
            match log_scale(arg) {
                Some(sc) if sc.is_one() => Term::Special(Special::YLog { a: k }),
                _ => Term::Other,
            }
        }
        _ => Term::Other,
    }
}

/// Recognizes the shape of `f` as a function of `var`.
pub fn match_shape(f: &Expr, var: &str, asm: &Assumptions) -> Result<Shape, Ambiguous> {
    let f = expand_log_scales(f, var);
    if !f.depends_on(var) {
        return Ok(Shape::Linear { c: Expr::zero(), b: f });
    }
    // Products such as `2 (y/2 + 2/y)` only show their terms once expanded.
    if let Some(shape) = match_terms(&f, var).or_else(|| match_terms(&f.expand(), var)) {
        return Ok(shape);
    }
    polynomial_shape(&f, var, asm)
}

/// Reads a shape off the top-level terms of `f`, if every term is
/// constant, linear or one single special term.
fn match_terms(f: &Expr, var: &str) -> Option<Shape> {
    let mut consts = Vec::new();
    let mut lins = Vec::new();
    let mut specials = Vec::new();
    for t in f.terms() {
        match classify_term(&t, var) {
            Term::Const(k) => consts.push(k),
            Term::Lin(k) => lins.push(k),
            Term::Special(s) => specials.push(s),
            Term::Other => return None,
        }
    }
    if specials.len() > 1 {
        return None;
    }
    let c = Expr::add(lins);
    let s = Expr::add(consts);
    Some(match specials.pop() {
        None => Shape::Linear { c, b: s },
        Some(Special::Power { r, a, b, n }) => Shape::Power { r, a, b, n, c, s },
        Some(Special::Exp { r, a }) => Shape::Exp { r, a, b: c, c: s },
        Some(Special::Log { a }) => Shape::Log { a, b: c, c: s },
        Some(Special::YLog { a }) => Shape::YLog { a, b: c, c: s },
    })
}

/// Rewrites `ln(k*y)` as `ln(k) + ln(y)` for constant `k`.
fn expand_log_scales(f: &Expr, var: &str) -> Expr {
    f.map_leaves(&|e| match e {
        Expr::Call(Func::Ln, arg) => {
            let c = poly_coeffs(arg, var)?;
            if c.len() == 2 && c[0].is_zero() && !c[1].is_one() {
                Some(c[1].clone().ln() + Expr::sym(var).ln())
            } else {
                None
            }
        }
        _ => None,
    })
}

fn binomial(n: u64, k: u64) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn polynomial_shape(f: &Expr, var: &str, asm: &Assumptions) -> Result<Shape, Ambiguous> {
    let Some(cs) = poly_coeffs(f, var) else {
        return Ok(Shape::Unrecognized);
    };
    let deg = cs.len().saturating_sub(1);
    let get = |k: usize| cs.get(k).cloned().unwrap_or_else(Expr::zero);
    match deg {
        0 | 1 => return Ok(Shape::Linear { c: get(1), b: get(0) }),
        2 => {
            return Ok(Shape::Quadratic {
                a: get(2),
                b: get(1),
                c: get(0),
            })
        }
        _ => {}
    }
    if deg > 24 {
        return Ok(Shape::Unrecognized);
    }
    // r (y + b)^N + c y + s
    let n = deg as u64;
    let r = get(deg);
    let b = get(deg - 1) / (Expr::int(n as i64) * &r);
    for k in 2..deg - 1 {
        let expected = &r * Expr::int(binomial(n, k as u64)) * b.clone().powi((deg - k) as i64);
        if !asm.is_zero(&(get(k) - expected))? {
            return Ok(Shape::Unrecognized);
        }
    }
    let c = get(1) - &r * Expr::int(n as i64) * b.clone().powi((deg - 1) as i64);
    let s = get(0) - &r * b.clone().powi(deg as i64);
    Ok(Shape::Power {
        r,
        a: Expr::one(),
        b,
        n: Expr::int(deg as i64),
        c,
        s,
    })
}
