use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{build_determining_system, VectorField};
use crate::expr::{Bindings, Expr};

/// Points closer than this to a singularity are skipped.
const GUARD_OFFSET: f64 = 1e-3;
/// Points where a guard expression exceeds this magnitude are skipped.
const GUARD_BOUND: f64 = 1e2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("every sample point was rejected ({0} points); the expressions have no usable domain on this grid")]
    AllRejected(usize),
}

/// Rectangle, sample counts and seed of a random sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub seed: u64,
}

impl GridSpec {
    pub const DEFAULT_SEED: u64 = 0xC1A5_51F1;

    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Same rectangle and seed, reflected to `y < 0`.
    pub fn negative_y(&self) -> Self {
        Self {
            y: (-self.y.1, -self.y.0),
            ..*self
        }
    }

    /// `nx` random abscissae crossed with `ny` random ordinates.
    pub fn sample(&self) -> SampleGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let xs: Vec<f64> = (0..self.nx).map(|_| rng.gen_range(self.x.0..=self.x.1)).collect();
        let ys: Vec<f64> = (0..self.ny).map(|_| rng.gen_range(self.y.0..=self.y.1)).collect();
        let points = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
        SampleGrid { points }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x: (-2.0, 2.0),
            y: (0.2, 3.0),
            nx: 50,
            ny: 50,
            seed: Self::DEFAULT_SEED,
        }
    }
}

/// Deterministic `(x, y)` sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub points: Vec<(f64, f64)>,
}

impl SampleGrid {
    pub fn from_points(points: Vec<(f64, f64)>) -> Self {
        Self { points }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualStats {
    pub max: f64,
    pub accepted: usize,
    pub rejected: usize,
}

fn guard_ok(g: &Expr, x: f64, y: f64) -> bool {
    let offsets = [
        (0.0, 0.0),
        (GUARD_OFFSET, 0.0),
        (-GUARD_OFFSET, 0.0),
        (0.0, GUARD_OFFSET),
        (0.0, -GUARD_OFFSET),
    ];
    offsets.iter().all(|(dx, dy)| {
        let b = Bindings::new().with("x", x + dx).with("y", y + dy);
        matches!(g.eval(&b), Ok(v) if v.abs() <= GUARD_BOUND)
    })
}

/// Maximum of `|e|` over the grid points where every guard is finite and
/// bounded near the point and every expression evaluates.
pub fn residual_stats(exprs: &[Expr], guards: &[Expr], grid: &SampleGrid) -> Result<ResidualStats, GridError> {
    let mut stats = ResidualStats {
        max: 0.0,
        accepted: 0,
        rejected: 0,
    };
    'points: for &(x, y) in &grid.points {
        if !guards.iter().all(|g| guard_ok(g, x, y)) {
            stats.rejected += 1;
            continue;
        }
        let b = Bindings::new().with("x", x).with("y", y);
        let mut local = 0.0f64;
        for e in exprs {
            match e.eval(&b) {
                Ok(v) => local = local.max(v.abs()),
                Err(_) => {
                    stats.rejected += 1;
                    continue 'points;
                }
            }
        }
        stats.accepted += 1;
        stats.max = stats.max.max(local);
    }
    if stats.accepted == 0 {
        return Err(GridError::AllRejected(grid.points.len()));
    }
    Ok(stats)
}

/// [`residual_stats`] without guards, returning only the maximum.
pub fn residual_max(exprs: &[Expr], grid: &SampleGrid) -> Result<f64, GridError> {
    residual_stats(exprs, &[], grid).map(|s| s.max)
}

/// Largest determining-equation residual of `v` for `(a, f)`, guarded by
/// `a`, `f` and both components of `v`: near a pole the residual is a
/// difference of very large terms and only its rounding error is measured.
/// Falls back to the reflected grid when `f` has no usable
/// points at `y > 0`.
pub fn field_residual(a: &Expr, f: &Expr, v: &VectorField, spec: &GridSpec) -> Result<f64, GridError> {
    let sys = build_determining_system(a, f, v);
    let guards = [a.clone(), f.clone(), v.xi.clone(), v.phi.clone()];
    match residual_stats(&sys.residuals, &guards, &spec.sample()) {
        Ok(s) => Ok(s.max),
        Err(_) => residual_stats(&sys.residuals, &guards, &spec.negative_y().sample()).map(|s| s.max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detsys::{condition, ConditionContext, ConditionName};
    use crate::expr::parse;

    #[test]
    fn zero_expression_has_zero_residual() {
        let grid = GridSpec::default().sample();
        assert_eq!(residual_max(&[Expr::zero()], &grid), Ok(0.0));
    }

    #[test]
    fn grid_is_deterministic() {
        assert_eq!(GridSpec::default().sample(), GridSpec::default().sample());
        assert_ne!(GridSpec::default().sample(), GridSpec::with_seed(7).sample());
        assert_eq!(GridSpec::default().sample().points.len(), 2500);
    }

    #[test]
    fn first_identity_on_a_cubic_coefficient() {
        let ctx = ConditionContext::theta(Expr::one());
        let a = parse("x^3 + 2*x").unwrap();
        let e1 = condition(ConditionName::E1, &ctx).unwrap().instantiate(&a);
        let e2 = condition(ConditionName::E2, &ctx).unwrap().instantiate(&a);
        let identity = e1 + Expr::int(5) * e2.diff("x") - Expr::int(4) * &a * e2;
        let grid = GridSpec { ny: 1, ..GridSpec::default() }.sample();
        assert!(residual_max(&[identity], &grid).unwrap() < 1e-8);
    }

    #[test]
    fn scaling_field_for_exponential_nonlinearity() {
        let a = parse("M/x").unwrap().substitute("M", &Expr::int(3));
        let f = parse("mu*exp(y)").unwrap().substitute("mu", &Expr::one());
        let v = VectorField::parse("x", "-2").unwrap();
        let sys = build_determining_system(&a, &f, &v);
        let grid = GridSpec::default().sample();
        let stats = residual_stats(&sys.residuals, &[a.clone(), f], &grid).unwrap();
        assert!(stats.max < 1e-10);
        let near_pole = SampleGrid::from_points(vec![(0.01, 1.0), (1.0, 1.0)]);
        let stats = residual_stats(&sys.residuals, &[a], &near_pole).unwrap();
        assert_eq!((stats.accepted, stats.rejected), (1, 1));
    }

    #[test]
    fn empty_domain_is_an_error() {
        let grid = GridSpec::default().sample();
        assert!(residual_max(&[parse("ln(-y)").unwrap()], &grid).is_err());
    }
}
