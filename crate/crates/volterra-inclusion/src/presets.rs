//! Built-in reference instances used by tests, examples and problem files.
//!
//! All of them carry certified data tables (derived from the closed-form
//! coefficients), so hypothesis lint passes by construction.

use crate::fields::Coeff;
use crate::kernels::KernelOperator;
use crate::operators::ProblemInstance;
use crate::timebase::{Grid, Trajectory};
use crate::{Matrix, Result, SetField, Vector};

/// The reference interval inclusion on `[0, 1]`:
/// `F(t,x) = [x−1, x+1]`, `k ≡ 1`, `h ≡ 0`.
pub fn reference_interval(p: f64, subintervals: usize) -> Result<ProblemInstance> {
    let grid = Grid::new(1.0, subintervals)?;
    ProblemInstance::builder(
        KernelOperator::scalar_constant(1.0),
        SetField::scalar_interval(1.0, 0.0, 1.0)?,
        Trajectory::zeros(grid, 1),
        p,
    )
    .build()
}

/// State-independent interval field `F ≡ [−1, 1]`, `k ≡ 1`, `h ≡ 0` on `[0, 1]`.
pub fn constant_interval(p: f64, subintervals: usize) -> Result<ProblemInstance> {
    let grid = Grid::new(1.0, subintervals)?;
    ProblemInstance::builder(
        KernelOperator::scalar_constant(1.0),
        SetField::scalar_interval(0.0, 0.0, 1.0)?,
        Trajectory::zeros(grid, 1),
        p,
    )
    .build()
}

/// Single-valued exponential growth: `f(t,x) = x`, `k ≡ 1`, `h ≡ 1`,
/// whose solution is `x(t) = e^t`.
pub fn exponential_growth(subintervals: usize) -> Result<ProblemInstance> {
    scaled_exponential(1.0, 1.0, subintervals)
}

/// Single-valued `f(t,x) = λx`, `k ≡ 1`, `h ≡ x₀`: solution `x₀·e^{λt}`.
pub fn scaled_exponential(lambda: f64, x0: f64, subintervals: usize) -> Result<ProblemInstance> {
    let grid = Grid::new(1.0, subintervals)?;
    ProblemInstance::builder(
        KernelOperator::scalar_constant(1.0),
        SetField::singleton(
            Coeff::Constant(Matrix::from_element(1, 1, lambda)),
            Coeff::Constant(Vector::zeros(1)),
        )?,
        Trajectory::constant(grid, Vector::from_vec(vec![x0])),
        1.0,
    )
    .build()
}

/// Planar instance with a rotating drift and a ball-valued disturbance:
/// `F(t,x) = Cx + d + Ball(0, 0.3)` with `C` a damped rotation, under an
/// exponentially decaying kernel.
pub fn planar_ball_drift(subintervals: usize) -> Result<ProblemInstance> {
    let grid = Grid::new(1.0, subintervals)?;
    let c = Matrix::from_row_slice(2, 2, &[-0.2, -0.6, 0.6, -0.2]);
    ProblemInstance::builder(
        KernelOperator::exp_decay(0.5, Matrix::identity(2, 2)),
        SetField::affine_ball(
            Coeff::Constant(c),
            Coeff::Constant(Vector::from_vec(vec![0.1, -0.1])),
            Coeff::Constant(0.3),
        )?,
        Trajectory::from_fn(grid, |t| Vector::from_vec(vec![t, 0.5 - t])),
        1.0,
    )
    .build()
}

/// Scalar constant source under a dissipative semigroup kernel on `[0, 1]`:
/// `F ≡ {1}`, `k(t,s) = e^{−a(t−s)}`. Used by the periodic-orbit solver,
/// whose smallness condition `e^{−aT} ≤ 1/2` holds for `a = 1`, `T = 1`.
pub fn decaying_point_source(a: f64, subintervals: usize) -> Result<ProblemInstance> {
    let grid = Grid::new(1.0, subintervals)?;
    ProblemInstance::builder(
        KernelOperator::semigroup(Matrix::from_element(1, 1, a)),
        SetField::singleton(
            Coeff::Constant(Matrix::zeros(1, 1)),
            Coeff::Constant(Vector::from_vec(vec![1.0])),
        )?,
        Trajectory::zeros(grid, 1),
        1.0,
    )
    .build()
}

/// The certified suite exercised by convergence checks: one instance per
/// built-in field variant, each with derived data tables.
pub fn certified_suite(subintervals: usize) -> Result<Vec<(&'static str, ProblemInstance)>> {
    Ok(vec![
        ("interval_p1", reference_interval(1.0, subintervals)?),
        ("interval_p2", reference_interval(2.0, subintervals)?),
        ("constant_interval", constant_interval(1.0, subintervals)?),
        ("exponential_growth", exponential_growth(subintervals)?),
        ("planar_ball_drift", planar_ball_drift(subintervals)?),
        ("decaying_point_source", decaying_point_source(1.0, subintervals)?),
    ])
}
