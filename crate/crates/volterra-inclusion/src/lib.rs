//! Numerical machinery for multivalued Volterra integral equations
//!
//! ```text
//! x(t) ∈ h(t) + ∫₀ᵗ k(t,s) F(s, x(s)) ds,     t ∈ [0, T]
//! ```
//!
//! in finite-dimensional Euclidean state spaces. A solution pairs a
//! continuous trajectory `x` with an integrable selection `w(t) ∈ F(t, x(t))`
//! such that `x = h + V(w)`, where `V` is the linear Volterra operator
//! `V(w)(t) = ∫₀ᵗ k(t,s) w(s) ds`.
//!
//! Everything is discretized on uniform grids: selections are piecewise
//! constant, trajectories piecewise linear, and the central fixed-point loop
//! contracts in an exponentially weighted L^p norm whose weight is adapted to
//! the kernel and to the Lipschitz modulus of the set-valued right-hand side.
//!
//! The crate is organized around the problem ingredients:
//!
//! - [`timebase`] — grids, quadrature, plain and weighted norms,
//! - [`convex`] — compact convex set values (support, projection, Hausdorff),
//! - [`kernels`] — kernel operators `k(t,s)`, matrix exponentials, slice
//!   norms and hypothesis lint,
//! - [`fields`] — set-valued right-hand sides `F(t,x)` with certified
//!   Lipschitz/growth data and hypothesis lint,
//! - [`operators`] — the Volterra operator, membership residuals and the
//!   contractive projection step,
//! - [`solvers`] — fixed-point solves, the successive-approximation
//!   selection scheme with its bound ledger, and periodic orbits,
//! - [`funnel`] — solution-set sampling, scalar envelopes, semicontinuity
//!   probes and step multifunctions over moving tubes,
//! - [`problem`] / [`cli`] — the batch front end (problem files in, CSV
//!   tables and machine-readable reports out).
//!
//! Start with the `examples/` directory: each file there is a runnable
//! walkthrough of one capability (`cargo run --example picard_fixed_point`,
//! `cargo run --example funnel_envelope`, ...). The thin `vinc` binary wraps
//! the same entry points for batch use.

pub mod cli;
pub mod convex;
pub mod fields;
pub mod funnel;
pub mod kernels;
mod linalg;
pub mod operators;
pub mod presets;
pub mod problem;
pub mod solvers;
pub mod timebase;

pub use convex::{ConvexRegion, Direction, DirectionNet};
pub use fields::{FieldData, FieldLintReport, SetField};
pub use kernels::{KernelLintReport, KernelOperator};
pub use operators::ProblemInstance;
pub use solvers::{SelectionLedger, SolveReport};
pub use timebase::{Grid, ScalarTable, Selection, Trajectory};

/// State vectors and points of the Euclidean state space.
pub type Vector = nalgebra::DVector<f64>;
/// Dense operators on the state space (kernel values, field coefficients).
pub type Matrix = nalgebra::DMatrix<f64>;

/// Errors shared by all modules of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid is invalid: {0}")]
    InvalidGrid(String),
    #[error("node index {index} out of range (grid has {len} entries)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("exponent p = {0} is outside [1, ∞)")]
    InvalidExponent(f64),
    #[error("weight constant M = {0} must be ≥ 1")]
    InvalidWeightConstant(f64),
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("kernel evaluated outside 0 ≤ s ≤ t: (t, s) = ({t}, {s})")]
    OutsideKernelDomain { t: f64, s: f64 },
    #[error("values must be finite: {0}")]
    NonFinite(String),
    #[error("{0}")]
    InvalidInput(String),
    #[error("selection-set probe needs distinct inputs")]
    IdenticalInputs,
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("bound-ledger recursion violated at iteration {n}, node {node}: lhs {lhs} > rhs {rhs}")]
    LedgerRecursion { n: usize, node: usize, lhs: f64, rhs: f64 },
    #[error("selection increment bound violated at iteration {n}, node {node}: |Δf| = {lhs} > {rhs}")]
    LedgerIncrement { n: usize, node: usize, lhs: f64, rhs: f64 },
    #[error("uniqueness check failed: solves from distinct seeds differ by {0}")]
    UniquenessCheck(f64),
    #[error("periodic smallness condition violated: ‖U(T)‖ = {0} > 1/2")]
    PeriodicSmallness(f64),
    #[error("field is not integrably bounded on the periodic ball: {0}")]
    NotIntegrablyBounded(String),
    #[error("periodicity defect {defect} exceeds {allowed}")]
    PeriodicityDefect { defect: f64, allowed: f64 },
    #[error("envelope oracle precondition failed: {0}")]
    EnvelopeOracle(String),
    #[error("dyadic level {level} incompatible with grid of {subintervals} subintervals")]
    DyadicLevel { level: u32, subintervals: usize },
    #[error("funnel sample is empty: no seed converged")]
    EmptyFunnel,
    #[error("problem file error: {0}")]
    ProblemFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
