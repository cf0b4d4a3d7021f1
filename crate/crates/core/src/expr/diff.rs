use super::{Expr, Func};

impl Expr {
    /// Exact derivative with respect to the variable `var`, normalized.
    pub fn diff(&self, var: &str) -> Expr {
        match self {
            Expr::Num(_) | Expr::Pi => Expr::zero(),
            Expr::Sym(s) => {
                if &**s == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Opaque { name, arg, order } => {
                if &**arg == var {
                    Expr::Opaque {
                        name: name.clone(),
                        arg: arg.clone(),
                        order: order + 1,
                    }
                } else {
                    Expr::zero()
                }
            }
            Expr::Add(xs) => Expr::add(xs.iter().map(|x| x.diff(var)).collect()),
            Expr::Mul(xs) => {
                let mut terms = Vec::with_capacity(xs.len());
                for (i, f) in xs.iter().enumerate() {
                    let df = f.diff(var);
                    if df.is_zero() {
                        continue;
                    }
                    let mut factors = Vec::with_capacity(xs.len());
                    factors.extend(xs[..i].iter().cloned());
                    factors.push(df);
                    factors.extend(xs[i + 1..].iter().cloned());
                    terms.push(Expr::mul(factors));
                }
                Expr::add(terms)
            }
            Expr::Pow(b, e) => {
                let db = b.diff(var);
                let de = e.diff(var);
                if de.is_zero() {
                    // e * b^(e-1) * b'
                    if db.is_zero() {
                        return Expr::zero();
                    }
                    let reduced = Expr::pow((**b).clone(), Expr::add(vec![(**e).clone(), Expr::int(-1)]));
                    Expr::mul(vec![(**e).clone(), reduced, db])
                } else {
                    // b^e * (e' ln b + e b'/b)
                    let inner = Expr::add(vec![
                        Expr::mul(vec![de, (**b).clone().ln()]),
                        Expr::mul(vec![(**e).clone(), db, Expr::pow((**b).clone(), Expr::int(-1))]),
                    ]);
                    Expr::mul(vec![self.clone(), inner])
                }
            }
            Expr::Call(func, a) => {
                let da = a.diff(var);
                if da.is_zero() {
                    return Expr::zero();
                }
                let a = (**a).clone();
                let outer = match func {
                    Func::Exp => self.clone(),
                    Func::Ln => Expr::pow(a, Expr::int(-1)),
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Tan => Expr::add(vec![Expr::one(), Expr::pow(a.tan(), Expr::int(2))]),
                };
                Expr::mul(vec![outer, da])
            }
        }
    }

    /// `k`-fold derivative.
    pub fn diff_n(&self, var: &str, k: usize) -> Expr {
        (0..k).fold(self.clone(), |acc, _| acc.diff(var))
    }
}
