//! Affine equivalence maps of `y'' = A(x) y' + F(y)` and the canonical
//! forms of `F` they produce.
//!
//! A map `x = k1 z + k2`, `y = k3 w + k4` sends the equation to one of the
//! same form with `B(z) = k1 A(k1 z + k2)` and
//! `H(w) = (k1^2 / k3) F(k3 w + k4)`. Images are returned in the original
//! variable names (`x`, `y`) so they can be fed straight back into the
//! pipeline.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::shape::{match_shape, Ambiguous, Assumptions, Shape};
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquivalenceError {
    #[error("equivalence map must have k1 != 0 and k3 != 0")]
    Degenerate,
}

/// `x = k1 z + k2`, `y = k3 w + k4` with `k1 k3 != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceMap {
    pub k1: Expr,
    pub k2: Expr,
    pub k3: Expr,
    pub k4: Expr,
}

impl EquivalenceMap {
    /// Rejects maps whose `k1` or `k3` is provably zero. Symbolic constants
    /// of undeclared sign are accepted.
    pub fn new(k1: Expr, k2: Expr, k3: Expr, k4: Expr) -> Result<Self, EquivalenceError> {
        let asm = Assumptions::new();
        for k in [&k1, &k3] {
            if asm.is_zero(k) == Ok(true) {
                return Err(EquivalenceError::Degenerate);
            }
        }
        Ok(Self { k1, k2, k3, k4 })
    }

    pub fn identity() -> Self {
        Self {
            k1: Expr::one(),
            k2: Expr::zero(),
            k3: Expr::one(),
            k4: Expr::zero(),
        }
    }

    /// Map acting on the dependent variable only.
    pub fn on_y(k3: Expr, k4: Expr) -> Self {
        Self {
            k3,
            k4,
            ..Self::identity()
        }
    }

    pub fn from_rationals(k: [(i64, i64); 4]) -> Result<Self, EquivalenceError> {
        let [a, b, c, d] = k.map(|(n, d)| Expr::rat(n, d));
        Self::new(a, b, c, d)
    }

    pub fn invert(&self) -> Self {
        let i1 = Expr::one() / &self.k1;
        let i3 = Expr::one() / &self.k3;
        Self {
            k2: -(&self.k2 * &i1),
            k4: -(&self.k4 * &i3),
            k1: i1,
            k3: i3,
        }
    }

    /// The map obtained by applying `self` first and then `next` to the
    /// transformed equation.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            k1: &self.k1 * &next.k1,
            k2: &self.k1 * &next.k2 + &self.k2,
            k3: &self.k3 * &next.k3,
            k4: &self.k3 * &next.k4 + &self.k4,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Old coordinates `(x, y)` of the point with new coordinates `(z, w)`.
    pub fn forward_point(&self, z: f64, w: f64) -> Option<(f64, f64)> {
        let [k1, k2, k3, k4] = self.values()?;
        Some((k1 * z + k2, k3 * w + k4))
    }

    pub fn values(&self) -> Option<[f64; 4]> {
        Some([
            self.k1.const_value()?,
            self.k2.const_value()?,
            self.k3.const_value()?,
            self.k4.const_value()?,
        ])
    }

    /// `{"k1": .., "k2": .., "k3": .., "k4": ..}` with exact expressions.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k1": self.k1.to_string(),
            "k2": self.k2.to_string(),
            "k3": self.k3.to_string(),
            "k4": self.k4.to_string(),
        })
    }
}

impl fmt::Display for EquivalenceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k1={}, k2={}, k3={}, k4={})", self.k1, self.k2, self.k3, self.k4)
    }
}

/// Image `(B, H)` of `(A, F)` under `g`, in the variables `x` and `y`.
pub fn act_on_coefficients(a: &Expr, f: &Expr, g: &EquivalenceMap) -> (Expr, Expr) {
    let x = Expr::sym("x");
    let y = Expr::sym("y");
    let b = &g.k1 * a.substitute("x", &(&g.k1 * &x + &g.k2));
    let h = &g.k1 * &g.k1 / &g.k3 * f.substitute("y", &(&g.k3 * &y + &g.k4));
    (b, h)
}

/// Canonical families of `F` reachable by maps acting on `y` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CanonicalTag {
    Linear,
    ExpPlusLinear,
    ExpPlusConst,
    LogPlusLinear,
    YLogYPlusConst,
    PowerPlusLinear,
    QuadraticPlusConst,
    Generic,
}

/// Canonical form of `F`, with the map realizing it.
///
/// For `PowerPlusLinear` the canonical expression is
/// `sign * y^n + lambda y + theta`; `sign` is `-1` only when the leading
/// coefficient cannot be made positive by a real map. The symmetry
/// conditions do not depend on it.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalF {
    pub tag: CanonicalTag,
    pub mu: Option<Expr>,
    pub lambda: Option<Expr>,
    pub theta: Option<Expr>,
    pub n: Option<Expr>,
    pub sign: i8,
    /// Acts on `y` only: `k1 = 1`, `k2 = 0`.
    pub witness: EquivalenceMap,
    /// The canonical right-hand side, in `y`.
    pub expr: Expr,
    pub shape: Shape,
}

impl CanonicalF {
    fn new(tag: CanonicalTag, witness: EquivalenceMap, expr: Expr, shape: Shape) -> Self {
        Self {
            tag,
            mu: None,
            lambda: None,
            theta: None,
            n: None,
            sign: 1,
            witness,
            expr,
            shape,
        }
    }
}

/// Reduces `F(y)` to its canonical form under maps acting on `y`.
pub fn canonicalize_f(f: &Expr, asm: &Assumptions) -> Result<CanonicalF, Ambiguous> {
    let shape = match_shape(f, "y", asm)?;
    let y = Expr::sym("y");
    let one = Expr::one;
    let out = match shape.clone() {
        Shape::Power { r, a, b, n, c, s } if n == Expr::int(2) => {
            let q = Shape::Quadratic {
                a: &r * &a * &a,
                b: Expr::int(2) * &r * &a * &b + &c,
                c: &r * &b * &b + &s,
            };
            return canonicalize_quadratic(q, shape);
        }
        Shape::Quadratic { .. } => return canonicalize_quadratic(shape.clone(), shape),
        Shape::Power { r, a, b, n, c, s } => {
            let sr = Expr::int(asm.sign(&r)? as i64);
            let sa = Expr::int(asm.sign(&a)? as i64);
            let magnitude = &r * &sr * Expr::pow(&a * &sa, n.clone());
            let k3 = &sa * Expr::pow(magnitude, one() / (one() - &n));
            let k4 = -(&b / &a);
            let theta = (&c * &k4 + &s) / &k3;
            let sign = (&sr * &sa).as_rational().map_or(1, |q| *q.numer() as i8);
            let expr = Expr::int(sign as i64) * Expr::pow(y.clone(), n.clone()) + &c * &y + &theta;
            let mut cf = CanonicalF::new(
                CanonicalTag::PowerPlusLinear,
                EquivalenceMap::on_y(k3, k4),
                expr,
                shape,
            );
            cf.n = Some(n);
            cf.lambda = Some(c);
            cf.theta = Some(theta);
            cf.sign = sign;
            cf
        }
        Shape::Exp { r, a, b, c } => {
            let k3 = one() / &a;
            if !asm.is_zero(&b)? {
                let k4 = -(&c / &b);
                let mu = &a * &r * (&a * &k4).exp();
                let expr = &mu * y.clone().exp() + &b * &y;
                let mut cf = CanonicalF::new(
                    CanonicalTag::ExpPlusLinear,
                    EquivalenceMap::on_y(k3, k4),
                    expr,
                    shape,
                );
                cf.mu = Some(mu);
                cf.lambda = Some(b);
                cf
            } else {
                let mu = &a * &r;
                let theta = &a * &c;
                let expr = &mu * y.clone().exp() + &theta;
                let mut cf = CanonicalF::new(
                    CanonicalTag::ExpPlusConst,
                    EquivalenceMap::on_y(k3, Expr::zero()),
                    expr,
                    shape,
                );
                cf.mu = Some(mu);
                cf.theta = Some(theta);
                cf
            }
        }
        Shape::Log { a, b, c } => {
            let k3 = (-(&c / &a)).exp();
            let mu = &a / &k3;
            let expr = &mu * y.clone().ln() + &b * &y;
            let mut cf = CanonicalF::new(
                CanonicalTag::LogPlusLinear,
                EquivalenceMap::on_y(k3, Expr::zero()),
                expr,
                shape,
            );
            cf.mu = Some(mu);
            cf.lambda = Some(b);
            cf
        }
        Shape::YLog { a, b, c } => {
            let k3 = (-(&b / &a)).exp();
            let theta = &c * (&b / &a).exp();
            let expr = &a * &y * y.clone().ln() + &theta;
            let mut cf = CanonicalF::new(
                CanonicalTag::YLogYPlusConst,
                EquivalenceMap::on_y(k3, Expr::zero()),
                expr,
                shape,
            );
            cf.mu = Some(a);
            cf.theta = Some(theta);
            cf
        }
        Shape::Linear { c, b } => {
            if !asm.is_zero(&c)? {
                let k4 = -(&b / &c);
                let expr = &c * &y;
                let mut cf = CanonicalF::new(
                    CanonicalTag::Linear,
                    EquivalenceMap::on_y(one(), k4),
                    expr,
                    shape,
                );
                cf.mu = Some(c.clone());
                cf.lambda = Some(c);
                cf.theta = Some(Expr::zero());
                cf
            } else {
                let zero_b = asm.is_zero(&b)?;
                let (k3, theta) = if zero_b {
                    (one(), Expr::zero())
                } else {
                    (b, one())
                };
                let mut cf = CanonicalF::new(
                    CanonicalTag::Linear,
                    EquivalenceMap::on_y(k3, Expr::zero()),
                    theta.clone(),
                    shape,
                );
                cf.lambda = Some(Expr::zero());
                cf.theta = Some(theta);
                cf
            }
        }
        Shape::Unrecognized => {
            CanonicalF::new(CanonicalTag::Generic, EquivalenceMap::identity(), f.clone(), shape)
        }
    };
    Ok(out)
}

fn canonicalize_quadratic(q: Shape, original: Shape) -> Result<CanonicalF, Ambiguous> {
    let Shape::Quadratic { a, b, c } = q else {
        unreachable!("caller passes a quadratic shape")
    };
    let k3 = Expr::one() / &a;
    let k4 = -(&b / (Expr::int(2) * &a));
    let theta = (Expr::int(4) * &a * &c - &b * &b) / Expr::int(4);
    let expr = Expr::sym("y").powi(2) + &theta;
    let mut cf = CanonicalF::new(
        CanonicalTag::QuadraticPlusConst,
        EquivalenceMap::on_y(k3, k4),
        expr,
        original,
    );
    cf.n = Some(Expr::int(2));
    cf.theta = Some(theta);
    Ok(cf)
}

/// `w'' + h(x) w = 0` form of `beta'' + f beta' + g beta = 0`, reached by
/// `beta = w exp(gauge_exponent * ∫ gauge_integrand dx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearReduction {
    pub h: Expr,
    pub gauge_integrand: Expr,
    pub gauge_exponent: Expr,
}

pub fn reduce_linear_ode(f: &Expr, g: &Expr) -> LinearReduction {
    let h = -(f * f - Expr::int(4) * g + Expr::int(2) * f.diff("x")) / Expr::int(4);
    LinearReduction {
        h,
        gauge_integrand: f.clone(),
        gauge_exponent: Expr::rat(-1, 2),
    }
}
