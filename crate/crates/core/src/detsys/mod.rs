//! Determining equations of the symmetry algebra, their reduction under the
//! polynomial-in-`y` ansatz, and the named compatibility expressions.

mod conditions;
mod grid;

use std::fmt;

use crate::equivalence::EquivalenceMap;
use crate::expr::Expr;

pub use conditions::{condition, ConditionContext, ConditionError, ConditionExpr, ConditionName};
pub use grid::{field_residual, residual_max, residual_stats, GridError, GridSpec, ResidualStats, SampleGrid};

/// `xi(x, y) d/dx + phi(x, y) d/dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub xi: Expr,
    pub phi: Expr,
}

impl VectorField {
    pub fn new(xi: Expr, phi: Expr) -> Self {
        Self { xi, phi }
    }

    pub fn parse(xi: &str, phi: &str) -> Result<Self, crate::expr::ParseError> {
        Ok(Self::new(crate::expr::parse(xi)?, crate::expr::parse(phi)?))
    }

    pub fn is_zero(&self) -> bool {
        self.xi.is_zero() && self.phi.is_zero()
    }

    pub fn scale(&self, k: &Expr) -> Self {
        Self::new(k * &self.xi, k * &self.phi)
    }

    pub fn substitute(&self, name: &str, value: &Expr) -> Self {
        Self::new(self.xi.substitute(name, value), self.phi.substitute(name, value))
    }

    /// The same field written in the coordinates `(x, y)` of the original
    /// equation, when `self` is written in the coordinates `(z, w)` of the
    /// image of `g` (still named `x`, `y`).
    pub fn pushforward(&self, g: &EquivalenceMap) -> Self {
        let z = (Expr::sym("x") - &g.k2) / &g.k1;
        let w = (Expr::sym("y") - &g.k4) / &g.k3;
        let back = |e: &Expr| e.substitute("x", &z).substitute("y", &w);
        Self::new(&g.k1 * back(&self.xi), &g.k3 * back(&self.phi))
    }
}

fn write_component(out: &mut String, coeff: &Expr, basis: &str) {
    if coeff.is_zero() {
        return;
    }
    let (c, _) = coeff.split_coeff();
    let negative = *c.numer() < 0;
    let magnitude = if negative { -coeff } else { coeff.clone() };
    if out.is_empty() {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    if magnitude.is_one() {
        out.push_str(basis);
    } else if matches!(magnitude, Expr::Add(_)) {
        out.push_str(&format!("({magnitude})*{basis}"));
    } else {
        out.push_str(&format!("{magnitude}*{basis}"));
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_component(&mut out, &self.xi, "dx");
        write_component(&mut out, &self.phi, "dy");
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// The four determining equations, as residuals that vanish identically
/// exactly when the field is a symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingSystem {
    pub residuals: [Expr; 4],
}

impl DeterminingSystem {
    pub fn iter(&self) -> impl Iterator<Item = &Expr> {
        self.residuals.iter()
    }
}

/// Determining equations of `y'' = A(x) y' + F(y)` evaluated on `v`.
pub fn build_determining_system(a: &Expr, f: &Expr, v: &VectorField) -> DeterminingSystem {
    let (xi, phi) = (&v.xi, &v.phi);
    let da = a.diff("x");
    let df = f.diff("y");
    let xi_x = xi.diff("x");
    let xi_y = xi.diff("y");
    let phi_x = phi.diff("x");
    let phi_y = phi.diff("y");
    let two = Expr::int(2);

    let r_a = xi_y.diff("y");
    let r_b = -(xi * &da) - a * &xi_x - Expr::int(3) * f * &xi_y - xi_x.diff("x")
        + &two * phi_x.diff("y");
    let r_c = -(phi * &df) - &two * f * &xi_x - a * &phi_x + f * &phi_y + phi_x.diff("x");
    let r_d = -(&two * a * &xi_y) - &two * xi_x.diff("y") + phi_y.diff("y");
    DeterminingSystem {
        residuals: [r_a, r_b, r_c, r_d],
    }
}

/// The general solution of the first and last determining equations,
/// `xi = alpha y + beta`, `phi = y^2 (A alpha + alpha') + y sigma + tau`,
/// with `alpha, beta, sigma, tau` unknown functions of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    pub field: VectorField,
}

pub fn reduced_ansatz(a: &Expr) -> Ansatz {
    let y = Expr::sym("y");
    let alpha = Expr::opaque("alpha", "x", 0);
    let beta = Expr::opaque("beta", "x", 0);
    let sigma = Expr::opaque("sigma", "x", 0);
    let tau = Expr::opaque("tau", "x", 0);
    let xi = &alpha * &y + &beta;
    let phi = y.clone().powi(2) * (a * &alpha + alpha.diff("x")) + &y * &sigma + &tau;
    Ansatz {
        field: VectorField::new(xi, phi),
    }
}

/// The two determining equations that remain after substituting the
/// ansatz, written out in closed form.
///
/// The `F'` term carries the sign obtained by direct substitution
/// (`-phi F'`).
pub fn reduced_residuals(a: &Expr, f: &Expr) -> [Expr; 2] {
    let y = Expr::sym("y");
    let al = |k| Expr::opaque("alpha", "x", k);
    let be = |k| Expr::opaque("beta", "x", k);
    let si = |k| Expr::opaque("sigma", "x", k);
    let ta = |k| Expr::opaque("tau", "x", k);
    let da = |k| a.diff_n("x", k);
    let df = f.diff("y");
    let (n2, n3) = (Expr::int(2), Expr::int(3));

    let first = -(&n3 * f * al(0))
        + &n3 * &y * (al(0) * da(1) + a * al(1) + al(2))
        - be(0) * da(1)
        - a * be(1)
        + &n2 * si(1)
        - be(2);

    let y2 = y.clone().powi(2);
    let second = &df * (-(&y * si(0)) - ta(0) - &y2 * (a * al(0) + al(1)))
        + f * (&n2 * a * &y * al(0) + si(0) - &n2 * be(1))
        - a * ta(1)
        + ta(2)
        + &y * (-(a * si(1)) + si(2))
        + &y2
            * (-(a * al(0) * da(1)) - a * a * al(1) + &n2 * da(1) * al(1) + al(0) * da(2) + al(3));
    [first, second]
}
