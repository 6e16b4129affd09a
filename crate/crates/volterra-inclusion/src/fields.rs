//! Set-valued right-hand sides `F(t,x)` together with their data functions
//! (Lipschitz modulus α, origin bound β, growth bound c) and hypothesis lint.
//!
//! Built-in families are affine in the state with a convex offset region:
//!
//! - `Singleton`: `F(t,x) = {C(t)x + d(t)}`,
//! - `AffineBox`: `F(t,x) = C(t)x + d(t) + Box(0, r(t))`,
//! - `AffineBall`: `F(t,x) = C(t)x + d(t) + Ball(0, ρ(t))`.
//!
//! Coefficients live on the grid (constant or one value per node) and are
//! interpolated linearly at subinterval midpoints, matching the sampling
//! convention of the solvers. Measurability in `t` and upper hemicontinuity
//! in `x` hold by construction for these continuous closed forms and are not
//! runtime-checked; convexity of every value is what the projection-based
//! solvers lean on, so nonconvex values are out of the variant algebra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::{hausdorff, ConvexRegion};
use crate::linalg::operator_norm;
use crate::timebase::{Grid, ScalarTable};
use crate::{Error, Matrix, Result, Vector};

/// Time-dependent coefficient: constant or one value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub enum Coeff<T> {
    Constant(T),
    PerNode(Vec<T>),
}

impl<T: Clone> Coeff<T> {
    pub fn at_node(&self, i: usize) -> T {
        match self {
            Coeff::Constant(v) => v.clone(),
            Coeff::PerNode(values) => values[i].clone(),
        }
    }

    fn check_len(&self, nodes: usize, what: &str) -> Result<()> {
        match self {
            Coeff::Constant(_) => Ok(()),
            Coeff::PerNode(values) if values.len() == nodes => Ok(()),
            Coeff::PerNode(values) => Err(Error::InvalidInput(format!(
                "{what} table has {} entries, grid has {} nodes",
                values.len(),
                nodes
            ))),
        }
    }
}

impl Coeff<Matrix> {
    fn at_midpoint(&self, j: usize) -> Matrix {
        match self {
            Coeff::Constant(v) => v.clone(),
            Coeff::PerNode(values) => (&values[j] + &values[j + 1]) * 0.5,
        }
    }
}

impl Coeff<Vector> {
    fn at_midpoint(&self, j: usize) -> Vector {
        match self {
            Coeff::Constant(v) => v.clone(),
            Coeff::PerNode(values) => (&values[j] + &values[j + 1]) * 0.5,
        }
    }
}

impl Coeff<f64> {
    fn at_midpoint(&self, j: usize) -> f64 {
        match self {
            Coeff::Constant(v) => *v,
            Coeff::PerNode(values) => 0.5 * (values[j] + values[j + 1]),
        }
    }
}

/// Evaluation time of per-grid data: a node or a subinterval (sampled at its
/// midpoint).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeSample {
    Node(usize),
    Subinterval(usize),
}

/// Set-valued right-hand side of the inclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct SetField {
    variant: FieldVariant,
    linear: Coeff<Matrix>,
    offset: Coeff<Vector>,
    dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum FieldVariant {
    Singleton,
    AffineBox { half_widths: Coeff<Vector> },
    AffineBall { radius: Coeff<f64> },
}

impl SetField {
    pub fn singleton(linear: Coeff<Matrix>, offset: Coeff<Vector>) -> Result<Self> {
        Self::build(FieldVariant::Singleton, linear, offset)
    }

    pub fn affine_box(
        linear: Coeff<Matrix>,
        offset: Coeff<Vector>,
        half_widths: Coeff<Vector>,
    ) -> Result<Self> {
        Self::build(FieldVariant::AffineBox { half_widths }, linear, offset)
    }

    pub fn affine_ball(
        linear: Coeff<Matrix>,
        offset: Coeff<Vector>,
        radius: Coeff<f64>,
    ) -> Result<Self> {
        Self::build(FieldVariant::AffineBall { radius }, linear, offset)
    }

    /// Scalar interval field `F(t,x) = [c·x + d − r, c·x + d + r]`.
    pub fn scalar_interval(c: f64, d: f64, r: f64) -> Result<Self> {
        Self::affine_box(
            Coeff::Constant(Matrix::from_element(1, 1, c)),
            Coeff::Constant(Vector::from_vec(vec![d])),
            Coeff::Constant(Vector::from_vec(vec![r])),
        )
    }

    fn build(variant: FieldVariant, linear: Coeff<Matrix>, offset: Coeff<Vector>) -> Result<Self> {
        let dim = match &linear {
            Coeff::Constant(m) => m.nrows(),
            Coeff::PerNode(ms) => ms.first().map_or(0, Matrix::nrows),
        };
        if dim == 0 {
            return Err(Error::InvalidInput("field needs a nonempty linear coefficient".into()));
        }
        let check_matrix = |m: &Matrix| -> Result<()> {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: m.nrows() });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("field linear coefficient".into()));
            }
            Ok(())
        };
        match &linear {
            Coeff::Constant(m) => check_matrix(m)?,
            Coeff::PerNode(ms) => ms.iter().try_for_each(check_matrix)?,
        }
        let check_vector = |v: &Vector| -> Result<()> {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("field offset".into()));
            }
            Ok(())
        };
        match &offset {
            Coeff::Constant(v) => check_vector(v)?,
            Coeff::PerNode(vs) => vs.iter().try_for_each(check_vector)?,
        }
        match &variant {
            FieldVariant::Singleton => {}
            FieldVariant::AffineBox { half_widths } => {
                let check = |v: &Vector| -> Result<()> {
                    check_vector(v)?;
                    if v.iter().any(|r| *r < 0.0) {
                        return Err(Error::InvalidRegion("half-widths must be ≥ 0".into()));
                    }
                    Ok(())
                };
                match half_widths {
                    Coeff::Constant(v) => check(v)?,
                    Coeff::PerNode(vs) => vs.iter().try_for_each(check)?,
                }
            }
            FieldVariant::AffineBall { radius } => {
                let check = |r: &f64| -> Result<()> {
                    if !(r.is_finite() && *r >= 0.0) {
                        return Err(Error::InvalidRegion(format!("ball radius {r} must be ≥ 0")));
                    }
                    Ok(())
                };
                match radius {
                    Coeff::Constant(r) => check(r)?,
                    Coeff::PerNode(rs) => rs.iter().try_for_each(check)?,
                }
            }
        }
        Ok(Self { variant, linear, offset, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_singleton(&self) -> bool {
        matches!(self.variant, FieldVariant::Singleton)
    }

    /// Check the coefficient tables against a grid.
    pub fn check_grid(&self, grid: Grid) -> Result<()> {
        let nodes = grid.node_count();
        self.linear.check_len(nodes, "linear")?;
        self.offset.check_len(nodes, "offset")?;
        match &self.variant {
            FieldVariant::Singleton => Ok(()),
            FieldVariant::AffineBox { half_widths } => half_widths.check_len(nodes, "half-widths"),
            FieldVariant::AffineBall { radius } => radius.check_len(nodes, "radius"),
        }
    }

    fn linear_at(&self, at: TimeSample) -> Matrix {
        match at {
            TimeSample::Node(i) => self.linear.at_node(i),
            TimeSample::Subinterval(j) => self.linear.at_midpoint(j),
        }
    }

    fn offset_at(&self, at: TimeSample) -> Vector {
        match at {
            TimeSample::Node(i) => self.offset.at_node(i),
            TimeSample::Subinterval(j) => self.offset.at_midpoint(j),
        }
    }

    /// The convex value `F(t, x)` at a grid time.
    pub fn eval(&self, at: TimeSample, x: &Vector) -> Result<ConvexRegion> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let center = self.linear_at(at) * x + self.offset_at(at);
        match &self.variant {
            FieldVariant::Singleton => Ok(ConvexRegion::point(center)),
            FieldVariant::AffineBox { half_widths } => {
                let r = match at {
                    TimeSample::Node(i) => half_widths.at_node(i),
                    TimeSample::Subinterval(j) => half_widths.at_midpoint(j),
                };
                ConvexRegion::aligned_box(center, r)
            }
            FieldVariant::AffineBall { radius } => {
                let rho = match at {
                    TimeSample::Node(i) => radius.at_node(i),
                    TimeSample::Subinterval(j) => radius.at_midpoint(j),
                };
                ConvexRegion::ball(center, rho)
            }
        }
    }

    /// Euclidean size of the offset region at a node (0 for singletons,
    /// `|r|` for boxes, ρ for balls).
    fn size_at_node(&self, i: usize) -> f64 {
        match &self.variant {
            FieldVariant::Singleton => 0.0,
            FieldVariant::AffineBox { half_widths } => half_widths.at_node(i).norm(),
            FieldVariant::AffineBall { radius } => radius.at_node(i),
        }
    }

    /// Scalar-only: the single-valued field of the upper (`+`) or lower
    /// (`−`) interval endpoint, `f±(t,x) = C(t)x + d(t) ± size(t)`.
    pub fn scalar_endpoint_field(&self, upper: bool) -> Result<SetField> {
        if self.dim != 1 {
            return Err(Error::InvalidInput(
                "endpoint fields are defined for scalar fields only".into(),
            ));
        }
        let sign = if upper { 1.0 } else { -1.0 };
        let size: Box<dyn Fn(usize) -> f64> = match &self.variant {
            FieldVariant::Singleton => Box::new(|_| 0.0),
            FieldVariant::AffineBox { half_widths } => {
                let hw = half_widths.clone();
                Box::new(move |i| hw.at_node(i)[0])
            }
            FieldVariant::AffineBall { radius } => {
                let r = radius.clone();
                Box::new(move |i| r.at_node(i))
            }
        };
        let size_is_constant = match &self.variant {
            FieldVariant::Singleton => true,
            FieldVariant::AffineBox { half_widths } => matches!(half_widths, Coeff::Constant(_)),
            FieldVariant::AffineBall { radius } => matches!(radius, Coeff::Constant(_)),
        };
        let offset = match (&self.offset, size_is_constant) {
            (Coeff::Constant(v), true) => {
                let mut shifted = v.clone();
                shifted[0] += sign * size(0);
                Coeff::Constant(shifted)
            }
            (Coeff::Constant(v), false) => Coeff::PerNode(
                (0..self.node_hint()?)
                    .map(|i| {
                        let mut shifted = v.clone();
                        shifted[0] += sign * size(i);
                        shifted
                    })
                    .collect(),
            ),
            (Coeff::PerNode(vs), _) => Coeff::PerNode(
                vs.iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let mut shifted = v.clone();
                        shifted[0] += sign * size(i);
                        shifted
                    })
                    .collect(),
            ),
        };
        SetField::singleton(self.linear.clone(), offset)
    }

    /// Node count implied by per-node tables, needed when mixing constant
    /// and per-node coefficients.
    fn node_hint(&self) -> Result<usize> {
        let from = |len: usize| if len > 0 { Some(len) } else { None };
        let hint = match &self.variant {
            FieldVariant::AffineBox { half_widths: Coeff::PerNode(vs) } => from(vs.len()),
            FieldVariant::AffineBall { radius: Coeff::PerNode(rs) } => from(rs.len()),
            _ => None,
        }
        .or(match &self.linear {
            Coeff::PerNode(ms) => from(ms.len()),
            _ => None,
        })
        .or(match &self.offset {
            Coeff::PerNode(vs) => from(vs.len()),
            _ => None,
        });
        hint.ok_or_else(|| {
            Error::InvalidInput("cannot infer node count from constant coefficients".into())
        })
    }
}

/// Certified data functions for a field: Lipschitz modulus, origin distance
/// bound and growth bound, all as node tables.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldData {
    pub alpha: ScalarTable,
    pub beta: ScalarTable,
    pub growth: ScalarTable,
}

impl FieldData {
    pub fn new(alpha: ScalarTable, beta: ScalarTable, growth: ScalarTable) -> Result<Self> {
        if alpha.grid() != beta.grid() || beta.grid() != growth.grid() {
            return Err(Error::GridMismatch);
        }
        for (name, table) in [("alpha", &alpha), ("beta", &beta), ("growth", &growth)] {
            if table.values().iter().any(|v| *v < 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be nonnegative")));
            }
        }
        Ok(Self { alpha, beta, growth })
    }
}

/// Certified data for the built-in families:
/// `α(t) = ‖C(t)‖`, `β(t) = |d(t)| + size(t)`, `c(t) = max{α(t), β(t)}`,
/// which yields `‖F(t,x)‖⁺ ≤ c(t)(1 + |x|)`.
pub fn derive_field_data(field: &SetField, grid: Grid) -> Result<FieldData> {
    field.check_grid(grid)?;
    let mut alpha = Vec::with_capacity(grid.node_count());
    let mut beta = Vec::with_capacity(grid.node_count());
    let mut growth = Vec::with_capacity(grid.node_count());
    for i in 0..grid.node_count() {
        let a = operator_norm(&field.linear.at_node(i));
        let b = field.offset.at_node(i).norm() + field.size_at_node(i);
        alpha.push(a);
        beta.push(b);
        growth.push(a.max(b));
    }
    FieldData::new(
        ScalarTable::new(grid, alpha)?,
        ScalarTable::new(grid, beta)?,
        ScalarTable::new(grid, growth)?,
    )
}

/// Seeded point cloud for sampling-based lint.
#[derive(Debug, Clone, Copy)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: usize,
    pub amplitude: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { seed: 0, samples: 64, amplitude: 4.0 }
    }
}

/// One sampled hypothesis violation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FieldWitness {
    pub t: f64,
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    pub measured: f64,
    pub bound: f64,
}

/// Sampled verdicts for the field hypotheses.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FieldLintReport {
    /// `d_H(F(t,x), F(t,y)) ≤ α(t)|x−y|` on sampled pairs.
    pub lipschitz: FieldCheck,
    /// `d(0, F(t,0)) ≤ β(t)` at the grid nodes.
    pub origin_bound: FieldCheck,
    /// `‖F(t,x)‖⁺ ≤ c(t)(1+|x|)` on sampled points.
    pub growth_bound: FieldCheck,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FieldCheck {
    pub name: &'static str,
    pub passed: bool,
    pub worst_margin: f64,
    pub witness: Option<FieldWitness>,
}

impl FieldLintReport {
    pub fn all_passed(&self) -> bool {
        self.lipschitz.passed && self.origin_bound.passed && self.growth_bound.passed
    }
}

const LINT_REL_SLACK: f64 = 1e-9;

/// Sampling lint of the field hypotheses against claimed data tables.
/// Never aborts; returns verdicts with witnesses.
pub fn lint_field(
    field: &SetField,
    data: &FieldData,
    grid: Grid,
    sampler: SamplerConfig,
) -> Result<FieldLintReport> {
    field.check_grid(grid)?;
    if data.alpha.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let dim = field.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let draw = |rng: &mut ChaCha8Rng| {
        Vector::from_fn(dim, |_, _| rng.random_range(-sampler.amplitude..sampler.amplitude))
    };

    let mut lipschitz = FieldCheck {
        name: "lipschitz",
        passed: true,
        worst_margin: f64::INFINITY,
        witness: None,
    };
    let mut growth = FieldCheck {
        name: "growth_bound",
        passed: true,
        worst_margin: f64::INFINITY,
        witness: None,
    };

    for _ in 0..sampler.samples {
        let i = rng.random_range(0..grid.node_count());
        let t = grid.node(i);
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let fx = field.eval(TimeSample::Node(i), &x)?;
        let fy = field.eval(TimeSample::Node(i), &y)?;
        let measured = hausdorff(&fx, &fy)?;
        let bound = data.alpha.value(i) * (&x - &y).norm();
        let margin = bound * (1.0 + LINT_REL_SLACK) + 1e-12 - measured;
        if margin < lipschitz.worst_margin {
            lipschitz.worst_margin = margin;
            if margin < 0.0 {
                lipschitz.witness = Some(FieldWitness {
                    t,
                    x: x.iter().cloned().collect(),
                    y: Some(y.iter().cloned().collect()),
                    measured,
                    bound,
                });
            }
        }

        let sup = fx.farthest_norm();
        let growth_bound = data.growth.value(i) * (1.0 + x.norm());
        let margin = growth_bound * (1.0 + LINT_REL_SLACK) + 1e-12 - sup;
        if margin < growth.worst_margin {
            growth.worst_margin = margin;
            if margin < 0.0 {
                growth.witness = Some(FieldWitness {
                    t,
                    x: x.iter().cloned().collect(),
                    y: None,
                    measured: sup,
                    bound: growth_bound,
                });
            }
        }
    }
    lipschitz.passed = lipschitz.worst_margin >= 0.0;
    growth.passed = growth.worst_margin >= 0.0;

    let mut origin = FieldCheck {
        name: "origin_bound",
        passed: true,
        worst_margin: f64::INFINITY,
        witness: None,
    };
    let zero = Vector::zeros(dim);
    for i in 0..grid.node_count() {
        let f0 = field.eval(TimeSample::Node(i), &zero)?;
        let measured = f0.distance(&zero)?;
        let bound = data.beta.value(i);
        let margin = bound * (1.0 + LINT_REL_SLACK) + 1e-12 - measured;
        if margin < origin.worst_margin {
            origin.worst_margin = margin;
            if margin < 0.0 {
                origin.witness = Some(FieldWitness {
                    t: grid.node(i),
                    x: vec![0.0; dim],
                    y: None,
                    measured,
                    bound,
                });
            }
        }
    }
    origin.passed = origin.worst_margin >= 0.0;

    Ok(FieldLintReport { lipschitz, origin_bound: origin, growth_bound: growth })
}
