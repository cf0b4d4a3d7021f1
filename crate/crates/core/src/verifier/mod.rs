//! Independent checks of candidate symmetries: the second prolongation
//! applied to the equation on its solution manifold, and transport of
//! numerical solution curves along the flow of the field.

mod flow;

use crate::detsys::{field_residual, GridSpec, VectorField};
use crate::expr::shape::poly_coeffs;
use crate::expr::Expr;

pub use flow::{
    fornberg_weights, flow_transport_check, integrate_ode, FlowCheck, IntegrationError, SolutionCurve,
};

/// Jet-space components of the second prolongation. `y1`, `y2` stand for
/// `y'`, `y''`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProlongedField {
    pub xi: Expr,
    pub phi: Expr,
    pub phi1: Expr,
    pub phi2: Expr,
}

/// `D_x = d/dx + y1 d/dy + y2 d/dy1`.
pub fn total_derivative(e: &Expr) -> Expr {
    e.diff("x") + Expr::sym("y1") * e.diff("y") + Expr::sym("y2") * e.diff("y1")
}

pub fn prolong2(v: &VectorField) -> ProlongedField {
    let y1 = Expr::sym("y1");
    let y2 = Expr::sym("y2");
    let dxi = total_derivative(&v.xi);
    let phi1 = total_derivative(&v.phi) - &y1 * &dxi;
    let phi2 = total_derivative(&phi1) - &y2 * &dxi;
    ProlongedField {
        xi: v.xi.clone(),
        phi: v.phi.clone(),
        phi1: phi1.expand(),
        phi2: phi2.expand(),
    }
}

/// `pr V (y2 - A y1 - F)` restricted to `y2 = A y1 + F`. Vanishes
/// identically exactly when `v` is a symmetry.
pub fn symmetry_residual(v: &VectorField, a: &Expr, f: &Expr) -> Expr {
    let pr = prolong2(v);
    let y1 = Expr::sym("y1");
    let on_shell = a * &y1 + f;
    let r = &pr.phi2 - &pr.xi * a.diff("x") * &y1 - a * &pr.phi1 - &pr.phi * f.diff("y");
    r.substitute("y2", &on_shell).expand()
}

/// Coefficients of `1, y1, y1^2, y1^3` in the symmetry residual, reordered
/// and signed to line up with the four determining equations.
pub fn determining_from_prolongation(v: &VectorField, a: &Expr, f: &Expr) -> [Expr; 4] {
    let r = symmetry_residual(v, a, f);
    let c = poly_coeffs(&r, "y1").expect("the residual is polynomial in y1");
    let get = |k: usize| c.get(k).cloned().unwrap_or_else(Expr::zero);
    [-get(3), get(1), get(0), get(2)]
}

/// A field passes the grid check when every determining residual is below this.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// A flow-transported curve passes when its defect is below this.
pub const FLOW_TOL: f64 = 1e-4;
pub const FLOW_STEP: f64 = 1e-3;
pub const FLOW_EPS: f64 = 1e-2;
pub const FLOW_STEPS: usize = 500;
/// Initial conditions `(x0, y0, y'0)` for the flow check. All lie in
/// `x > 0`, `y > 0` so that reciprocal coefficients and powers of `y` are
/// defined along the curves.
pub const FLOW_INITIALS: [(f64, f64, f64); 3] = [(1.0, 1.0, 0.3), (1.2, 0.8, -0.2), (0.8, 1.5, 0.1)];

/// Flow check from one initial condition. `Err` carries an integration
/// failure.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun {
    pub initial: (f64, f64, f64),
    pub outcome: Result<FlowCheck, IntegrationError>,
}

impl FlowRun {
    /// `false` only for a measured defect at or above [`FLOW_TOL`];
    /// inconclusive runs do not count as failures.
    pub fn passed(&self) -> bool {
        match &self.outcome {
            Ok(FlowCheck::Defect(d)) => *d < FLOW_TOL,
            Ok(FlowCheck::Inconclusive(_)) => true,
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldVerification {
    /// Largest determining residual on the grid, or why it is missing.
    pub residual: Result<f64, String>,
    pub flow: Vec<FlowRun>,
}

impl FieldVerification {
    pub fn residual_passed(&self) -> bool {
        matches!(self.residual, Ok(r) if r < RESIDUAL_TOL)
    }

    pub fn passed(&self) -> bool {
        self.residual_passed() && self.flow.iter().all(FlowRun::passed)
    }
}

/// Runs the flow check for `v` from each of `initials`.
pub fn flow_runs(v: &VectorField, a: &Expr, f: &Expr, initials: &[(f64, f64, f64)]) -> Vec<FlowRun> {
    initials
        .iter()
        .map(|&(x0, y0, p0)| FlowRun {
            initial: (x0, y0, p0),
            outcome: integrate_ode(a, f, x0, y0, p0, FLOW_STEP, FLOW_STEPS)
                .map(|curve| flow_transport_check(v, a, f, FLOW_EPS, &curve)),
        })
        .collect()
}

/// Grid residual of `v`, plus the flow check from [`FLOW_INITIALS`] when
/// `flow` is set. `a` and `f` must be numeric.
pub fn verify_field(a: &Expr, f: &Expr, v: &VectorField, grid: &GridSpec, flow: bool) -> FieldVerification {
    FieldVerification {
        residual: field_residual(a, f, v, grid).map_err(|e| e.to_string()),
        flow: if flow { flow_runs(v, a, f, &FLOW_INITIALS) } else { Vec::new() },
    }
}
