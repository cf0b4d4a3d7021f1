use thiserror::Error;

use crate::detsys::VectorField;
use crate::expr::{Bindings, Expr};

/// Trajectories with `|y|` above this are treated as blown up.
const BLOW_UP: f64 = 1e6;
/// A truncated trajectory must keep at least this many samples.
const MIN_SAMPLES: usize = 10;
/// RK4 sub-steps used to follow the flow of a field over one `eps`.
const FLOW_SUBSTEPS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("step size must be positive, got {0}")]
    BadStep(f64),
    #[error("integration stopped after {0} samples, fewer than the {MIN_SAMPLES} required")]
    TooShort(usize),
}

/// Samples `(x_i, y_i, y'_i)` of a numerical solution on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionCurve {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub y1s: Vec<f64>,
    pub h: f64,
    /// `(x0, y0, y'0)`.
    pub initial: (f64, f64, f64),
    /// Set when a domain error or the blow-up guard cut the curve short.
    pub truncated: bool,
}

impl SolutionCurve {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Right-hand side of the first-order system `(y, p)' = (p, A p + F)`.
fn rhs(a: &Expr, f: &Expr, x: f64, y: f64, p: f64) -> Option<(f64, f64)> {
    let av = a.eval(&Bindings::new().with("x", x)).ok()?;
    let fv = f.eval(&Bindings::new().with("y", y)).ok()?;
    let dp = av * p + fv;
    dp.is_finite().then_some((p, dp))
}

/// Classical RK4 for `y'' = A(x) y' + F(y)` from `(x0, y0, y1_0)`.
pub fn integrate_ode(
    a: &Expr,
    f: &Expr,
    x0: f64,
    y0: f64,
    y1_0: f64,
    h: f64,
    steps: usize,
) -> Result<SolutionCurve, IntegrationError> {
    if !(h > 0.0) {
        return Err(IntegrationError::BadStep(h));
    }
    let mut curve = SolutionCurve {
        xs: vec![x0],
        ys: vec![y0],
        y1s: vec![y1_0],
        h,
        initial: (x0, y0, y1_0),
        truncated: false,
    };
    let (mut y, mut p) = (y0, y1_0);
    for i in 0..steps {
        let x = x0 + i as f64 * h;
        let step = || {
            let k1 = rhs(a, f, x, y, p)?;
            let k2 = rhs(a, f, x + h / 2.0, y + h / 2.0 * k1.0, p + h / 2.0 * k1.1)?;
            let k3 = rhs(a, f, x + h / 2.0, y + h / 2.0 * k2.0, p + h / 2.0 * k2.1)?;
            let k4 = rhs(a, f, x + h, y + h * k3.0, p + h * k3.1)?;
            Some((
                y + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                p + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            ))
        };
        match step() {
            Some((ny, np)) if ny.abs() <= BLOW_UP && np.is_finite() => {
                y = ny;
                p = np;
                // Multiplying rather than accumulating keeps the abscissae exact
                // multiples of h.
                curve.xs.push(x0 + (i + 1) as f64 * h);
                curve.ys.push(y);
                curve.y1s.push(p);
            }
            _ => {
                curve.truncated = true;
                break;
            }
        }
    }
    if curve.len() < MIN_SAMPLES {
        return Err(IntegrationError::TooShort(curve.len()));
    }
    Ok(curve)
}

/// Finite-difference weights for derivatives of order `0..=m` at `z` on
/// arbitrary distinct nodes. `w[k][j]` multiplies the value at `nodes[j]`
/// in the `k`-th derivative.
pub fn fornberg_weights(z: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Outcome of transporting a solution curve along a field.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowCheck {
    /// Maximum ODE defect of the transported curve over interior points.
    Defect(f64),
    /// The transported points no longer form a graph over `x`, or the
    /// field or coefficients could not be evaluated along the way.
    Inconclusive(String),
}

impl FlowCheck {
    pub fn defect(&self) -> Option<f64> {
        match self {
            FlowCheck::Defect(d) => Some(*d),
            FlowCheck::Inconclusive(_) => None,
        }
    }
}

fn field_at(v: &VectorField, x: f64, y: f64) -> Option<(f64, f64)> {
    let b = Bindings::new().with("x", x).with("y", y);
    Some((v.xi.eval(&b).ok()?, v.phi.eval(&b).ok()?))
}

fn transport(v: &VectorField, eps: f64, x: f64, y: f64) -> Option<(f64, f64)> {
    let d = eps / FLOW_SUBSTEPS as f64;
    let (mut x, mut y) = (x, y);
    for _ in 0..FLOW_SUBSTEPS {
        let k1 = field_at(v, x, y)?;
        let k2 = field_at(v, x + d / 2.0 * k1.0, y + d / 2.0 * k1.1)?;
        let k3 = field_at(v, x + d / 2.0 * k2.0, y + d / 2.0 * k2.1)?;
        let k4 = field_at(v, x + d * k3.0, y + d * k3.1)?;
        x += d / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y += d / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    Some((x, y))
}

/// Moves every sample of `curve` by the time-`eps` flow of `v`, refits the
/// image as a graph `y(x)` with 5-point stencils and returns the largest
/// defect `|y'' - A y' - F|` at interior points.
pub fn flow_transport_check(v: &VectorField, a: &Expr, f: &Expr, eps: f64, curve: &SolutionCurve) -> FlowCheck {
    let mut pts = Vec::with_capacity(curve.len());
    for (&x, &y) in curve.xs.iter().zip(&curve.ys) {
        match transport(v, eps, x, y) {
            Some(p) => pts.push(p),
            None => return FlowCheck::Inconclusive(format!("flow leaves the domain near x = {x}")),
        }
    }
    if pts.len() < 5 {
        return FlowCheck::Inconclusive("fewer than five samples".into());
    }
    if pts.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return FlowCheck::Inconclusive("transported abscissae are not increasing".into());
    }
    let mut worst = 0.0f64;
    for i in 2..pts.len() - 2 {
        let nodes: Vec<f64> = pts[i - 2..=i + 2].iter().map(|p| p.0).collect();
        let vals: Vec<f64> = pts[i - 2..=i + 2].iter().map(|p| p.1).collect();
        let (xi, yi) = pts[i];
        let w = fornberg_weights(xi, &nodes, 2);
        let d1: f64 = w[1].iter().zip(&vals).map(|(c, y)| c * y).sum();
        let d2: f64 = w[2].iter().zip(&vals).map(|(c, y)| c * y).sum();
        let Some((_, rhs2)) = rhs(a, f, xi, yi, d1) else {
            return FlowCheck::Inconclusive(format!("coefficients do not evaluate at x = {xi}"));
        };
        worst = worst.max((d2 - rhs2).abs());
    }
    FlowCheck::Defect(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn straight_line_is_exact() {
        let c = integrate_ode(&Expr::zero(), &Expr::zero(), 0.5, 1.0, 2.0, 0.01, 100).unwrap();
        for (x, y) in c.xs.iter().zip(&c.ys) {
            assert!((y - (1.0 + 2.0 * (x - 0.5))).abs() < 1e-13);
        }
    }

    #[test]
    fn harmonic_oscillator_over_a_period() {
        let steps = (2.0 * std::f64::consts::PI / 1e-3) as usize;
        let c = integrate_ode(&Expr::zero(), &p("-y"), 0.0, 0.0, 1.0, 1e-3, steps).unwrap();
        let err = c.xs.iter().zip(&c.ys).map(|(x, y)| (y - x.sin()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn logarithm_oracle() {
        let c = integrate_ode(&p("-1/x"), &Expr::zero(), 1.0, 0.0, 1.0, 1e-3, 1000).unwrap();
        let err = c.xs.iter().zip(&c.ys).map(|(x, y)| (y - x.ln()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn blow_up_truncates() {
        let c = integrate_ode(&Expr::zero(), &p("y^2"), 0.0, 1.0, 1.0, 1e-2, 1000).unwrap();
        assert!(c.truncated && c.len() < 1000);
        assert_eq!(
            integrate_ode(&Expr::zero(), &p("ln(y)"), 0.0, -1.0, 0.0, 1e-2, 100),
            Err(IntegrationError::TooShort(1))
        );
    }

    #[test]
    fn weights_on_a_uniform_stencil() {
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let d2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w[2].iter().zip(d2) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn translation_preserves_solutions() {
        let (a, f) = (p("2"), p("sin(y)"));
        let c = integrate_ode(&a, &f, 0.0, 0.5, 0.1, 1e-3, 500).unwrap();
        let v = VectorField::parse("1", "0").unwrap();
        let moved = flow_transport_check(&v, &a, &f, 1e-2, &c).defect().unwrap();
        let still = flow_transport_check(&v, &a, &f, 0.0, &c).defect().unwrap();
        assert!(moved < 1e-6 && (moved - still).abs() < 1e-6);
    }

    #[test]
    fn non_symmetry_is_detected() {
        let f = p("y^2");
        let c = integrate_ode(&Expr::zero(), &f, 0.0, 1.0, 0.0, 1e-3, 500).unwrap();
        let v = VectorField::parse("0", "1").unwrap();
        assert!(flow_transport_check(&v, &Expr::zero(), &f, 0.05, &c).defect().unwrap() > 1e-2);
    }

    #[test]
    fn folding_flow_is_inconclusive() {
        let c = integrate_ode(&Expr::zero(), &Expr::zero(), 0.0, 0.0, 1.0, 1e-2, 100).unwrap();
        let v = VectorField::parse("-10*x", "0").unwrap();
        // The first field keeps the order of the abscissae, the second reverses it.
        let r = VectorField::parse("-y*100", "0").unwrap();
        assert!(matches!(flow_transport_check(&v, &Expr::zero(), &Expr::zero(), 1e-2, &c), FlowCheck::Defect(_)));
        assert!(matches!(flow_transport_check(&r, &Expr::zero(), &Expr::zero(), 1.0, &c), FlowCheck::Inconclusive(_)));
    }
}
