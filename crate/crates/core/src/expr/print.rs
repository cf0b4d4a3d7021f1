use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::{Expr, Rational};

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_POW: u8 = 3;

pub(super) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut s = String::new();
    emit(e, 0, &mut s);
    f.write_str(&s)
}

fn emit(e: &Expr, parent: u8, out: &mut String) {
    match e {
        Expr::Num(q) => emit_number(q, parent, out),
        Expr::Pi => out.push_str("pi"),
        Expr::Sym(s) => out.push_str(s),
        Expr::Opaque { name, arg, order } => {
            out.push_str(name);
            match order {
                0 => {}
                1..=3 => (0..*order).for_each(|_| out.push('\'')),
                k => {
                    let _ = write!(out, "^({k})");
                }
            }
            let _ = write!(out, "({arg})");
        }
        Expr::Add(xs) => {
            let open = parent > PREC_ADD;
            if open {
                out.push('(');
            }
            for (i, t) in xs.iter().enumerate() {
                let (c, rest) = t.split_coeff();
                if i > 0 && c.is_negative() {
                    out.push_str(" - ");
                    let mut factors = vec![Expr::Num(-c)];
                    factors.extend(rest);
                    // A subtracted sum keeps its parentheses.
                    let term = Expr::mul(factors);
                    let prec = if matches!(term, Expr::Add(_)) { PREC_MUL } else { PREC_ADD };
                    emit(&term, prec, out);
                } else {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    emit(t, PREC_ADD, out);
                }
            }
            if open {
                out.push(')');
            }
        }
        Expr::Mul(xs) => emit_product(xs, parent, out),
        Expr::Pow(b, x) => {
            if let Some(q) = x.as_rational() {
                if q.is_negative() {
                    emit_product(std::slice::from_ref(e), parent, out);
                    return;
                }
                if q == Rational::new(1, 2) {
                    out.push_str("sqrt(");
                    emit(b, 0, out);
                    out.push(')');
                    return;
                }
            }
            let open = parent > PREC_POW;
            if open {
                out.push('(');
            }
            emit_atom(b, out);
            out.push('^');
            emit_atom(x, out);
            if open {
                out.push(')');
            }
        }
        Expr::Call(func, a) => {
            out.push_str(func.name());
            out.push('(');
            emit(a, 0, out);
            out.push(')');
        }
    }
}

fn is_atomic(e: &Expr) -> bool {
    match e {
        Expr::Num(q) => q.is_integer() && !q.is_negative(),
        Expr::Pi | Expr::Sym(_) | Expr::Call(..) | Expr::Opaque { .. } => true,
        Expr::Pow(_, x) => x.as_rational() == Some(Rational::new(1, 2)),
        _ => false,
    }
}

fn emit_atom(e: &Expr, out: &mut String) {
    if is_atomic(e) {
        emit(e, PREC_POW + 1, out);
    } else {
        out.push('(');
        emit(e, 0, out);
        out.push(')');
    }
}

fn emit_number(q: &Rational, parent: u8, out: &mut String) {
    let needs_parens = (q.is_negative() && parent > PREC_ADD) || (!q.is_integer() && parent > PREC_MUL);
    if needs_parens {
        out.push('(');
    }
    if q.is_integer() {
        let _ = write!(out, "{}", q.numer());
    } else {
        let _ = write!(out, "{}/{}", q.numer(), q.denom());
    }
    if needs_parens {
        out.push(')');
    }
}

fn emit_product(xs: &[Expr], parent: u8, out: &mut String) {
    let mut coeff = Rational::one();
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<Expr> = Vec::new();
    for x in xs {
        match x {
            Expr::Num(q) => coeff *= *q,
            Expr::Pow(b, e) if e.as_rational().is_some_and(|q| q.is_negative()) => {
                let q = e.as_rational().unwrap();
                den.push(Expr::pow((**b).clone(), Expr::Num(-q)));
            }
            other => num.push(other.clone()),
        }
    }
    let negative = coeff.is_negative();
    let coeff = coeff.abs();
    let n_coeff = Rational::from_integer(*coeff.numer());
    let d_coeff = Rational::from_integer(*coeff.denom());
    if !n_coeff.is_one() || num.is_empty() {
        num.insert(0, Expr::Num(n_coeff));
    }
    if !d_coeff.is_one() {
        den.insert(0, Expr::Num(d_coeff));
    }

    let open = parent > PREC_MUL || (negative && parent > PREC_ADD);
    if open {
        out.push('(');
    }
    if negative {
        out.push('-');
    }
    for (i, f) in num.iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        emit(f, PREC_MUL + 1, out);
    }
    if !den.is_empty() {
        out.push('/');
        if den.len() == 1 && (is_atomic(&den[0]) || matches!(den[0], Expr::Pow(..))) {
            emit(&den[0], PREC_MUL + 1, out);
        } else {
            out.push('(');
            for (i, f) in den.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                emit(f, PREC_MUL + 1, out);
            }
            out.push(')');
        }
    }
    if open {
        out.push(')');
    }
}
