//! Symbolic expressions over one or two real variables.
//!
//! [`Expr`] is an immutable tree kept in a light normal form: sums and
//! products are flattened and sorted, numeric constants are folded exactly
//! as rationals, and identical subtrees are collected (`2*x + 3*x -> 5*x`,
//! `x*x^2 -> x^3`). There is no general simplifier. The normal form is only
//! strong enough for the structural matching done by [`shape`] and the
//! classifier, and zero tests that cannot be decided structurally are done
//! numerically by the callers.
//!
//! Variables and parameters share the [`Expr::Sym`] leaf; which names are
//! variables is decided by the caller. Unknown functions of one variable
//! (`A(x)`, `alpha(x)`) and their derivatives are first-class leaves
//! ([`Expr::Opaque`]) that can later be replaced by a concrete expression
//! with [`Expr::instantiate`].

mod diff;
mod eval;
mod normalize;
mod parse;
mod print;
pub mod shape;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};

pub use eval::{Bindings, EvalError};
pub use parse::{parse, ParseError};

/// Exact rational constant.
pub type Rational = num_rational::Rational64;

/// Interned-ish symbol name.
pub type Symbol = Arc<str>;

/// Elementary functions understood by the parser, differentiator and
/// evaluator. `sqrt` is not a function node: it is parsed as `a^(1/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            _ => return None,
        })
    }
}

/// Expression node. Construct through the normalizing constructors
/// ([`Expr::add`], [`Expr::mul`], [`Expr::pow`], [`Expr::call`]) or the
/// arithmetic operators; the raw variants are public for pattern matching.
///
/// The derived ordering is the canonical node ordering used to sort the
/// operands of `Add` and `Mul`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Num(Rational),
    Pi,
    Sym(Symbol),
    /// `order`-th derivative of the unknown function `name(arg)`.
    Opaque {
        name: Symbol,
        arg: Symbol,
        order: u32,
    },
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Rational::one())
    }

    pub fn int(v: i64) -> Expr {
        Expr::Num(Rational::from_integer(v))
    }

    pub fn rat(num: i64, den: i64) -> Expr {
        Expr::Num(Rational::new(num, den))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(Arc::from(name))
    }

    pub fn opaque(name: &str, arg: &str, order: u32) -> Expr {
        Expr::Opaque {
            name: Arc::from(name),
            arg: Arc::from(arg),
            order,
        }
    }

    pub fn exp(self) -> Expr {
        Expr::call(Func::Exp, self)
    }

    pub fn ln(self) -> Expr {
        Expr::call(Func::Ln, self)
    }

    pub fn sin(self) -> Expr {
        Expr::call(Func::Sin, self)
    }

    pub fn cos(self) -> Expr {
        Expr::call(Func::Cos, self)
    }

    pub fn tan(self) -> Expr {
        Expr::call(Func::Tan, self)
    }

    pub fn sqrt(self) -> Expr {
        Expr::pow(self, Expr::rat(1, 2))
    }

    pub fn powi(self, k: i64) -> Expr {
        Expr::pow(self, Expr::int(k))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Expr::Num(q) => Some(*q),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_one())
    }

    pub fn is_number(&self) -> bool {
        matches!(self, Expr::Num(_))
    }

    /// Names of all `Sym` leaves (variables and parameters).
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Num(_) | Expr::Pi => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Opaque { arg, .. } => {
                out.insert(arg.clone());
            }
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.collect_symbols(out)),
            Expr::Pow(b, e) => {
                b.collect_symbols(out);
                e.collect_symbols(out);
            }
            Expr::Call(_, a) => a.collect_symbols(out),
        }
    }

    /// Names of the unknown functions appearing in the tree.
    pub fn opaque_functions(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Opaque { name, .. } = e {
                out.insert(name.clone());
            }
        });
        out
    }

    pub fn depends_on(&self, var: &str) -> bool {
        let mut found = false;
        self.visit(&mut |e| match e {
            Expr::Sym(s) if &**s == var => found = true,
            Expr::Opaque { arg, .. } if &**arg == var => found = true,
            _ => {}
        });
        found
    }

    /// True when the tree has no symbols and no unknown functions.
    pub fn is_constant(&self) -> bool {
        self.free_symbols().is_empty()
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.visit(f)),
            Expr::Pow(b, e) => {
                b.visit(f);
                e.visit(f);
            }
            Expr::Call(_, a) => a.visit(f),
            _ => {}
        }
    }

    /// Rebuilds the tree bottom-up, letting `f` replace leaves. The result is
    /// renormalized.
    pub fn map_leaves(&self, f: &impl Fn(&Expr) -> Option<Expr>) -> Expr {
        if let Some(r) = f(self) {
            return r;
        }
        match self {
            Expr::Num(_) | Expr::Pi | Expr::Sym(_) | Expr::Opaque { .. } => self.clone(),
            Expr::Add(xs) => Expr::add(xs.iter().map(|x| x.map_leaves(f)).collect()),
            Expr::Mul(xs) => Expr::mul(xs.iter().map(|x| x.map_leaves(f)).collect()),
            Expr::Pow(b, e) => Expr::pow(b.map_leaves(f), e.map_leaves(f)),
            Expr::Call(func, a) => Expr::call(*func, a.map_leaves(f)),
        }
    }

    /// Replaces every occurrence of the symbol `name` by `value`.
    pub fn substitute(&self, name: &str, value: &Expr) -> Expr {
        self.map_leaves(&|e| match e {
            Expr::Sym(s) if &**s == name => Some(value.clone()),
            Expr::Opaque { arg, .. } if &**arg == name => {
                panic!("cannot substitute `{name}` inside an unknown function; instantiate it first")
            }
            _ => None,
        })
    }

    /// Replaces the unknown function `name` and all its derivatives by the
    /// concrete expression `value` (a function of the opaque's argument).
    pub fn instantiate(&self, name: &str, value: &Expr) -> Expr {
        self.map_leaves(&|e| match e {
            Expr::Opaque {
                name: n,
                arg,
                order,
            } if &**n == name => {
                let mut d = value.clone();
                for _ in 0..*order {
                    d = d.diff(arg);
                }
                Some(d)
            }
            _ => None,
        })
    }

    /// Renormalizes the whole tree. Trees built through the constructors are
    /// already normal, so this is the identity on them.
    pub fn normalize(&self) -> Expr {
        self.map_leaves(&|_| None)
    }

    /// Distributes products over sums (not inside function arguments or
    /// non-integer powers). Used before reading off coefficients.
    pub fn expand(&self) -> Expr {
        match self {
            Expr::Add(xs) => Expr::add(xs.iter().map(|x| x.expand()).collect()),
            Expr::Mul(xs) => {
                let mut acc: Vec<Expr> = vec![Expr::one()];
                for f in xs {
                    let f = f.expand();
                    let terms = match f {
                        Expr::Add(ts) => ts,
                        other => vec![other],
                    };
                    let mut next = Vec::with_capacity(acc.len() * terms.len());
                    for a in &acc {
                        for t in &terms {
                            let p = Expr::mul(vec![a.clone(), t.clone()]);
                            // Merged bases can reappear as sums or powers of sums.
                            next.push(match p {
                                Expr::Add(_) | Expr::Pow(..) => p.expand(),
                                other => other,
                            });
                        }
                    }
                    acc = next;
                }
                Expr::add(acc)
            }
            Expr::Pow(b, e) => {
                let b = b.expand();
                if let (Expr::Add(_), Some(k)) = (&b, e.as_rational()) {
                    if k.is_integer() && k.is_positive() && *k.numer() <= 12 {
                        // Distribute term by term: multiplying two equal sums
                        // through the normalizer would just rebuild the power.
                        let base_terms = b.terms();
                        let mut acc = vec![Expr::one()];
                        for _ in 0..*k.numer() {
                            let mut next = Vec::with_capacity(acc.len() * base_terms.len());
                            for a in &acc {
                                for t in &base_terms {
                                    next.push(Expr::mul(vec![a.clone(), t.clone()]).expand());
                                }
                            }
                            acc = Expr::add(next).terms();
                        }
                        return Expr::add(acc);
                    }
                }
                Expr::pow(b, (**e).clone())
            }
            other => other.clone(),
        }
    }

    /// Numerical value of a constant tree (no symbols), if it evaluates.
    pub fn const_value(&self) -> Option<f64> {
        if !self.is_constant() {
            return None;
        }
        self.eval(&Bindings::new()).ok()
    }

    /// The top-level summands (a single-element slice for non-sums).
    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Add(xs) => xs.clone(),
            other => vec![other.clone()],
        }
    }

    /// Splits a product into its numeric coefficient and the remaining
    /// factors.
    pub fn split_coeff(&self) -> (Rational, Vec<Expr>) {
        match self {
            Expr::Num(q) => (*q, vec![]),
            Expr::Mul(xs) => match xs.first() {
                Some(Expr::Num(q)) => (*q, xs[1..].to_vec()),
                _ => (Rational::one(), xs.clone()),
            },
            other => (Rational::one(), vec![other.clone()]),
        }
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_expr(self, f)
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Expr {
        Expr::int(v)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Expr {
        Expr::Num(q)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, Expr::pow(rhs, Expr::int(-1))])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul(vec![Expr::int(-1), self])
    }
}

macro_rules! ref_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr { $tr::$m(self.clone(), rhs.clone()) }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { $tr::$m(self.clone(), rhs) }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr { $tr::$m(self, rhs.clone()) }
        }
    )*};
}
ref_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}
