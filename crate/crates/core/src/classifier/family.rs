use crate::expr::shape::{poly_coeffs, Ambiguous, Assumptions};
use crate::expr::{Expr, Func};

/// Recognized shapes of the coefficient `A(x)`. Coefficients are exact.
#[derive(Debug, Clone, PartialEq)]
pub enum AFamily {
    Constant(Expr),
    /// `p / (x + m)`.
    Reciprocal { p: Expr, m: Expr },
    /// `slope x + intercept`, slope nonzero.
    Affine { slope: Expr, intercept: Expr },
    /// `c tan(a x + b)`.
    Tan { c: Expr, a: Expr, b: Expr },
    Other,
}

impl AFamily {
    pub fn name(&self) -> &'static str {
        match self {
            AFamily::Constant(_) => "constant",
            AFamily::Reciprocal { .. } => "reciprocal",
            AFamily::Affine { .. } => "affine",
            AFamily::Tan { .. } => "tan",
            AFamily::Other => "other",
        }
    }

    /// The coefficient rebuilt from the recognized parameters, so that
    /// equal coefficients written differently reach the engine in one
    /// form. `None` for [`AFamily::Other`].
    pub fn rebuild(&self) -> Option<Expr> {
        let x = Expr::sym("x");
        match self {
            AFamily::Constant(m) => Some(m.clone()),
            AFamily::Reciprocal { p, m } => Some(p / (x + m)),
            AFamily::Affine { slope, intercept } => Some(slope * x + intercept),
            AFamily::Tan { c, a, b } => Some(c * (a * x + b).tan()),
            AFamily::Other => None,
        }
    }

    /// `x + m` for the reciprocal family, `x` otherwise.
    pub fn shifted_x(&self) -> Expr {
        match self {
            AFamily::Reciprocal { m, .. } => Expr::sym("x") + m,
            _ => Expr::sym("x"),
        }
    }
}

fn linear_in_x(e: &Expr, asm: &Assumptions) -> Result<Option<(Expr, Expr)>, Ambiguous> {
    let Some(c) = poly_coeffs(&e.expand(), "x") else {
        return Ok(None);
    };
    if c.len() != 2 || asm.is_zero(&c[1])? {
        return Ok(None);
    }
    Ok(Some((c[1].clone(), c[0].clone())))
}

fn match_tan(a: &Expr, asm: &Assumptions) -> Result<Option<AFamily>, Ambiguous> {
    let factors = match a {
        Expr::Mul(fs) => fs.clone(),
        other => vec![other.clone()],
    };
    let mut arg = None;
    let mut coeff = Vec::new();
    for f in factors {
        match f {
            Expr::Call(Func::Tan, inner) if arg.is_none() => arg = Some(*inner),
            other if !other.depends_on("x") => coeff.push(other),
            _ => return Ok(None),
        }
    }
    let Some(arg) = arg else { return Ok(None) };
    let Some((slope, shift)) = linear_in_x(&arg, asm)? else {
        return Ok(None);
    };
    Ok(Some(AFamily::Tan {
        c: Expr::mul(coeff),
        a: slope,
        b: shift,
    }))
}

pub fn recognize(a: &Expr, asm: &Assumptions) -> Result<AFamily, Ambiguous> {
    if !a.depends_on("x") {
        return Ok(AFamily::Constant(a.clone()));
    }
    if let Some(t) = match_tan(a, asm)? {
        return Ok(t);
    }
    if let Some((slope, intercept)) = linear_in_x(a, asm)? {
        return Ok(AFamily::Affine { slope, intercept });
    }
    let inverse = (Expr::one() / a).expand();
    if let Some((c1, c0)) = linear_in_x(&inverse, asm)? {
        return Ok(AFamily::Reciprocal {
            p: (Expr::one() / &c1).expand(),
            m: (c0 / c1).expand(),
        });
    }
    Ok(AFamily::Other)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn rec(s: &str) -> AFamily {
        let mut asm = Assumptions::new();
        asm.declare_nonzero("M");
        recognize(&parse(s).unwrap(), &asm).unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(rec("0"), AFamily::Constant(Expr::zero()));
        assert_eq!(rec("M"), AFamily::Constant(Expr::sym("M")));
    }

    #[test]
    fn reciprocals() {
        assert_eq!(
            rec("3/x"),
            AFamily::Reciprocal {
                p: Expr::int(3),
                m: Expr::zero()
            }
        );
        assert_eq!(
            rec("-15/(x + 1/2)"),
            AFamily::Reciprocal {
                p: Expr::int(-15),
                m: Expr::rat(1, 2)
            }
        );
        assert_eq!(
            rec("-(8/6)/x"),
            AFamily::Reciprocal {
                p: Expr::rat(-4, 3),
                m: Expr::zero()
            }
        );
        assert_eq!(
            rec("4/(2*x + 6)"),
            AFamily::Reciprocal {
                p: Expr::int(2),
                m: Expr::int(3)
            }
        );
        assert!(matches!(rec("M/x"), AFamily::Reciprocal { .. }));
    }

    #[test]
    fn affine_and_tan() {
        assert_eq!(
            rec("2*x + 1"),
            AFamily::Affine {
                slope: Expr::int(2),
                intercept: Expr::one()
            }
        );
        assert_eq!(
            rec("3*tan(2*x + 1)"),
            AFamily::Tan {
                c: Expr::int(3),
                a: Expr::int(2),
                b: Expr::one()
            }
        );
        assert_eq!(rec("tan(x)").name(), "tan");
    }

    #[test]
    fn others() {
        assert_eq!(rec("x^2"), AFamily::Other);
        assert_eq!(rec("sin(x)"), AFamily::Other);
        assert_eq!(rec("tan(x^2)"), AFamily::Other);
        assert_eq!(rec("1/x^2"), AFamily::Other);
    }
}
