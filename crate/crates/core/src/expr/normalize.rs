use std::collections::BTreeMap;

use num_traits::{CheckedAdd, CheckedMul, One, Signed, Zero};

use super::{Expr, Func, Rational};

impl Expr {
    /// Normalizing n-ary sum.
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(terms.len());
        for t in terms {
            match t {
                Expr::Add(xs) => flat.extend(xs),
                other => flat.push(other),
            }
        }

        let mut constant = Rational::zero();
        let mut leftovers = Vec::new();
        let mut collected: BTreeMap<Expr, Rational> = BTreeMap::new();
        for t in flat {
            if let Expr::Num(q) = t {
                match constant.checked_add(&q) {
                    Some(s) => constant = s,
                    None => leftovers.push(Expr::Num(q)),
                }
                continue;
            }
            let (c, rest) = t.split_coeff();
            let key = match rest.len() {
                1 => rest.into_iter().next().unwrap(),
                _ => Expr::Mul(rest),
            };
            let entry = collected.entry(key.clone()).or_insert_with(Rational::zero);
            match entry.checked_add(&c) {
                Some(s) => *entry = s,
                None => leftovers.push(make_term(c, key)),
            }
        }

        let mut out = leftovers;
        if !constant.is_zero() {
            out.push(Expr::Num(constant));
        }
        for (key, c) in collected {
            if !c.is_zero() {
                out.push(make_term(c, key));
            }
        }
        out.sort();
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Add(out),
        }
    }

    /// Normalizing n-ary product.
    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f {
                Expr::Mul(xs) => flat.extend(xs),
                other => flat.push(other),
            }
        }

        let mut coeff = Rational::one();
        let mut stray_numbers = Vec::new();
        let mut bases: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
        for f in flat {
            match f {
                Expr::Num(q) => {
                    if q.is_zero() {
                        return Expr::zero();
                    }
                    match coeff.checked_mul(&q) {
                        Some(p) => coeff = p,
                        None => stray_numbers.push(Expr::Num(q)),
                    }
                }
                Expr::Pow(b, e) => bases.entry(*b).or_default().push(*e),
                other => bases.entry(other).or_default().push(Expr::one()),
            }
        }

        let mut out = stray_numbers;
        let mut pending = Vec::new();
        for (base, exps) in bases {
            let e = if exps.len() == 1 {
                exps.into_iter().next().unwrap()
            } else {
                Expr::add(exps)
            };
            match Expr::pow(base, e) {
                Expr::Num(q) => {
                    if q.is_zero() {
                        return Expr::zero();
                    }
                    match coeff.checked_mul(&q) {
                        Some(p) => coeff = p,
                        None => out.push(Expr::Num(q)),
                    }
                }
                m @ Expr::Mul(_) => pending.push(m),
                other => out.push(other),
            }
        }
        if !pending.is_empty() {
            out.extend(pending);
            out.push(Expr::Num(coeff));
            return Expr::mul(out);
        }

        out.sort();
        if !coeff.is_one() {
            out.insert(0, Expr::Num(coeff));
        }
        match out.len() {
            0 => Expr::Num(coeff),
            1 => out.pop().unwrap(),
            _ => Expr::Mul(out),
        }
    }

    /// Normalizing power.
    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if exponent.is_zero() {
            return Expr::one();
        }
        if exponent.is_one() {
            return base;
        }
        if base.is_one() {
            return Expr::one();
        }
        let k = exponent.as_rational();
        match (&base, k) {
            (Expr::Num(b), Some(k)) => {
                if b.is_zero() {
                    return if k.is_positive() {
                        Expr::zero()
                    } else {
                        Expr::Pow(Box::new(base), Box::new(exponent))
                    };
                }
                if let Some(v) = fold_rational_power(*b, k) {
                    return Expr::Num(v);
                }
                Expr::Pow(Box::new(base), Box::new(exponent))
            }
            (Expr::Pow(inner, f), Some(k)) if k.is_integer() => {
                Expr::pow((**inner).clone(), Expr::mul(vec![(**f).clone(), Expr::Num(k)]))
            }
            (Expr::Mul(xs), Some(k)) if k.is_integer() => Expr::mul(
                xs.iter()
                    .map(|x| Expr::pow(x.clone(), Expr::Num(k)))
                    .collect(),
            ),
            _ => Expr::Pow(Box::new(base), Box::new(exponent)),
        }
    }

    /// Normalizing function application.
    pub fn call(func: Func, arg: Expr) -> Expr {
        match (func, &arg) {
            (Func::Exp, a) if a.is_zero() => Expr::one(),
            (Func::Exp, Expr::Call(Func::Ln, inner)) => (**inner).clone(),
            (Func::Ln, a) if a.is_one() => Expr::zero(),
            (Func::Ln, Expr::Call(Func::Exp, inner)) => (**inner).clone(),
            (Func::Sin | Func::Tan, a) if a.is_zero() => Expr::zero(),
            (Func::Cos, a) if a.is_zero() => Expr::one(),
            _ => Expr::Call(func, Box::new(arg)),
        }
    }
}

fn make_term(c: Rational, key: Expr) -> Expr {
    if c.is_one() {
        return key;
    }
    let mut factors = vec![Expr::Num(c)];
    match key {
        Expr::Mul(xs) => factors.extend(xs),
        other => factors.push(other),
    }
    Expr::Mul(factors)
}

fn checked_int_pow(b: Rational, k: u32) -> Option<Rational> {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc = acc.checked_mul(&b)?;
    }
    Some(acc)
}

fn int_root(v: i64, q: u32) -> Option<i64> {
    if v < 0 {
        return if q % 2 == 1 { int_root(-v, q).map(|r| -r) } else { None };
    }
    let guess = (v as f64).powf(1.0 / q as f64).round() as i64;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| {
        r >= 0 && checked_int_pow(Rational::from_integer(r), q) == Some(Rational::from_integer(v))
    })
}

/// Exact value of `b^k` when it is rational and representable.
fn fold_rational_power(b: Rational, k: Rational) -> Option<Rational> {
    let p = *k.numer();
    let q = *k.denom();
    if p.unsigned_abs() > 64 || q > 64 {
        return None;
    }
    let root = if q == 1 {
        b
    } else {
        let n = int_root(*b.numer(), q as u32)?;
        let d = int_root(*b.denom(), q as u32)?;
        Rational::new(n, d)
    };
    let mag = checked_int_pow(root, p.unsigned_abs() as u32)?;
    if p < 0 {
        if mag.is_zero() {
            return None;
        }
        Some(mag.recip())
    } else {
        Some(mag)
    }
}
