//! The assembled problem and its operators: the linear Volterra map `V`,
//! membership residuals of the superposition (Nemytskii) set, the projection
//! realization of the contractive map `G(h,u) = N(h + V(u))`, and
//! Hausdorff/excess probes between selection sets.
//!
//! Sampling convention: a selection value `w_j` represents the subinterval
//! `[t_j, t_{j+1})` and is matched against the field at the subinterval
//! midpoint, with trajectories interpolated linearly there. `V` samples the
//! kernel at the same midpoints, so the discrete fixed-point equations are
//! the midpoint collocation of the integral equation (second-order accurate
//! on smooth single-valued problems).
//!
//! Distances between selection sets use that the sets are decomposable
//! (stable under measurable patching): for pointwise sets `A(t)`, `B(t)`,
//! patching moves both the infimum over `B` and the supremum over `A` inside
//! the integral, so the one-sided excess in the weighted norm is exactly
//! `(∫ ω(t)·e(A(t), B(t))^p dt)^{1/p}` and the Hausdorff distance is the
//! larger of the two one-sided aggregates.

use std::sync::Arc;

use crate::convex::excess;
use crate::fields::{
    derive_field_data, lint_field, FieldData, FieldLintReport, SamplerConfig, SetField, TimeSample,
};
use crate::kernels::{big_m, lint_kernel, KernelGridTable, KernelLintReport, KernelOperator};
use crate::linalg::operator_norm;
use crate::timebase::{
    bielecki_node_weights, bielecki_norm_with_weights, check_exponent, conjugate_exponent,
    weighted_lp_aggregate, Grid, ScalarTable, Selection, Trajectory,
};
use crate::{Error, Result, Vector};

/// A validated, immutable problem: kernel, set-valued field, inhomogeneity,
/// exponent and grid, together with derived quantities (weight constant `M`,
/// weighted-norm node weights) and attached lint reports.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    kernel: KernelOperator,
    field: SetField,
    data: FieldData,
    inhomogeneity: Trajectory,
    exponent: f64,
    grid: Grid,
    dim: usize,
    weight_constant: f64,
    node_weights: Arc<Vec<f64>>,
    kernel_table: Arc<KernelGridTable>,
    derivative_bound: ScalarTable,
    kernel_lint: Arc<KernelLintReport>,
    field_lint: Arc<FieldLintReport>,
}

/// Staged construction of a [`ProblemInstance`]; data tables and the kernel
/// derivative bound are derived when not supplied.
pub struct ProblemBuilder {
    kernel: KernelOperator,
    field: SetField,
    inhomogeneity: Trajectory,
    exponent: f64,
    data: Option<FieldData>,
    derivative_bound: Option<ScalarTable>,
    lint_sampler: SamplerConfig,
}

impl ProblemBuilder {
    pub fn field_data(mut self, data: FieldData) -> Self {
        self.data = Some(data);
        self
    }

    pub fn derivative_bound(mut self, mu: ScalarTable) -> Self {
        self.derivative_bound = Some(mu);
        self
    }

    pub fn lint_sampler(mut self, sampler: SamplerConfig) -> Self {
        self.lint_sampler = sampler;
        self
    }

    pub fn build(self) -> Result<ProblemInstance> {
        let grid = self.inhomogeneity.grid();
        check_exponent(self.exponent)?;
        let dim = self.field.dim();
        if self.kernel.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.kernel.dim() });
        }
        if self.inhomogeneity.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.inhomogeneity.dim() });
        }
        self.field.check_grid(grid)?;

        let data = match self.data {
            Some(data) => {
                if data.alpha.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                data
            }
            None => derive_field_data(&self.field, grid)?,
        };
        let mu = match self.derivative_bound {
            Some(mu) => {
                if mu.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                mu
            }
            None => derive_derivative_bound(&self.kernel, grid),
        };

        let weight_constant = big_m(&self.kernel, self.exponent, grid)?;
        let node_weights = bielecki_node_weights(&data.alpha, weight_constant, self.exponent)?;
        let q = conjugate_exponent(self.exponent);
        let kernel_lint = lint_kernel(&self.kernel, grid, &mu, q)?;
        let field_lint = lint_field(&self.field, &data, grid, self.lint_sampler)?;
        let kernel_table = KernelGridTable::tabulate(&self.kernel, grid);

        Ok(ProblemInstance {
            kernel: self.kernel,
            field: self.field,
            data,
            inhomogeneity: self.inhomogeneity,
            exponent: self.exponent,
            grid,
            dim,
            weight_constant,
            node_weights: Arc::new(node_weights),
            kernel_table: Arc::new(kernel_table),
            derivative_bound: mu,
            kernel_lint: Arc::new(kernel_lint),
            field_lint: Arc::new(field_lint),
        })
    }
}

/// Certified bound on `‖∂k/∂t(t,s)‖` for the built-in kernel variants.
pub fn derive_derivative_bound(kernel: &KernelOperator, grid: Grid) -> ScalarTable {
    let horizon = grid.horizon();
    let bound = match kernel {
        KernelOperator::Constant { .. } => 0.0,
        KernelOperator::SeparableSmooth { family, matrix } => {
            let scale = operator_norm(matrix);
            match family {
                crate::kernels::KernelProfile::ExpDecay { rate } => {
                    rate.abs() * ((-rate).max(0.0) * horizon).exp() * scale
                }
                crate::kernels::KernelProfile::Difference => scale,
            }
        }
        KernelOperator::Semigroup { generator } => {
            let norm_a = operator_norm(generator);
            norm_a * (norm_a * horizon).exp()
        }
    };
    ScalarTable::constant(grid, bound)
}

impl ProblemInstance {
    pub fn builder(
        kernel: KernelOperator,
        field: SetField,
        inhomogeneity: Trajectory,
        exponent: f64,
    ) -> ProblemBuilder {
        ProblemBuilder {
            kernel,
            field,
            inhomogeneity,
            exponent,
            data: None,
            derivative_bound: None,
            lint_sampler: SamplerConfig::default(),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn conjugate_exponent(&self) -> f64 {
        conjugate_exponent(self.exponent)
    }

    /// The weight constant `M = max{1, sup_t ‖k(t,·)‖_q^p}`.
    pub fn weight_constant(&self) -> f64 {
        self.weight_constant
    }

    pub fn kernel(&self) -> &KernelOperator {
        &self.kernel
    }

    pub fn field(&self) -> &SetField {
        &self.field
    }

    pub fn field_data(&self) -> &FieldData {
        &self.data
    }

    pub fn inhomogeneity(&self) -> &Trajectory {
        &self.inhomogeneity
    }

    pub fn derivative_bound_table(&self) -> &ScalarTable {
        &self.derivative_bound
    }

    pub fn kernel_lint(&self) -> &KernelLintReport {
        &self.kernel_lint
    }

    pub fn field_lint(&self) -> &FieldLintReport {
        &self.field_lint
    }

    /// Node weights of the adapted weighted norm.
    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    /// Same kernel, grid and inhomogeneity with a different field; data
    /// tables, weights and lint are rebuilt for the new field.
    pub fn with_field(&self, field: SetField) -> Result<ProblemInstance> {
        ProblemInstance::builder(
            self.kernel.clone(),
            field,
            self.inhomogeneity.clone(),
            self.exponent,
        )
        .build()
    }

    /// Same problem with a different inhomogeneity on the same grid; derived
    /// tables and lint reports are shared.
    pub fn with_inhomogeneity(&self, inhomogeneity: Trajectory) -> Result<ProblemInstance> {
        if inhomogeneity.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        if inhomogeneity.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: inhomogeneity.dim(),
            });
        }
        let mut clone = self.clone();
        clone.inhomogeneity = inhomogeneity;
        Ok(clone)
    }

    /// Weighted norm `|||w|||_p` with the instance's adapted weights.
    pub fn weighted_norm(&self, w: &Selection) -> Result<f64> {
        if w.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(bielecki_norm_with_weights(w, &self.node_weights, self.exponent))
    }

    fn check_selection(&self, w: &Selection) -> Result<()> {
        if w.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        if w.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: w.dim() });
        }
        Ok(())
    }

    /// The Volterra image `V(w)(t_i) = Σ_{j<i} (T/N)·k(t_i, mid_j)·w_j`,
    /// with `V(w)(0) = 0`.
    pub fn volterra_apply(&self, w: &Selection) -> Result<Trajectory> {
        self.check_selection(w)?;
        let h_step = self.grid.spacing();
        let n = self.grid.subintervals();
        let mut values = Vec::with_capacity(n + 1);
        values.push(Vector::zeros(self.dim));
        for i in 1..=n {
            let mut acc = Vector::zeros(self.dim);
            for j in 0..i {
                acc.gemv(h_step, self.kernel_table.at_midpoint(i, j), w.value(j), 1.0);
            }
            values.push(acc);
        }
        Trajectory::new(self.grid, values)
    }

    /// `h + V(w)`, the trajectory induced by a selection.
    pub fn trajectory_from(&self, w: &Selection) -> Result<Trajectory> {
        self.inhomogeneity.add(&self.volterra_apply(w)?)
    }

    /// Pointwise distances `d(w_j, F(mid_j, x(mid_j)))` and their L^p
    /// aggregate. The table stores the residual of subinterval `j` at entry
    /// `j`; the final node has no subinterval and holds 0. The aggregate
    /// vanishes iff `w` is a grid-exact member of the superposition set of
    /// `x`.
    pub fn nemytskii_residual(&self, x: &Trajectory, w: &Selection) -> Result<(ScalarTable, f64)> {
        self.check_selection(w)?;
        if x.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.subintervals();
        let h_step = self.grid.spacing();
        let p = self.exponent;
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        for j in 0..n {
            let region = self.field.eval(TimeSample::Subinterval(j), &x.at_midpoint(j))?;
            let dist = region.distance(w.value(j))?;
            table.push(dist);
            acc += h_step * if p == 1.0 { dist } else { dist.powf(p) };
        }
        table.push(0.0);
        let aggregate = if p == 1.0 { acc } else { acc.powf(1.0 / p) };
        Ok((ScalarTable::new(self.grid, table)?, aggregate))
    }

    /// One projection step of the contractive map: with `x = h + V(u)`,
    /// `u'_j = project(u_j, F(mid_j, x(mid_j)))`. The image is a grid-exact
    /// member of `G(h, u)`; the slack selection of the abstract nearest-point
    /// argument is realized with zero tolerance because every built-in region
    /// has an exact Euclidean projection.
    pub fn gp_project_step(&self, u: &Selection) -> Result<Selection> {
        let x = self.trajectory_from(u)?;
        self.gp_project_step_at(&x, u)
    }

    /// Projection step against a precomputed trajectory `x = h + V(u)`.
    pub(crate) fn gp_project_step_at(&self, x: &Trajectory, u: &Selection) -> Result<Selection> {
        self.check_selection(u)?;
        let n = self.grid.subintervals();
        let mut values = Vec::with_capacity(n);
        for j in 0..n {
            let region = self.field.eval(TimeSample::Subinterval(j), &x.at_midpoint(j))?;
            values.push(region.project(u.value(j))?);
        }
        Selection::new(self.grid, values)
    }

    /// Weighted Hausdorff distance between the selection sets described by
    /// `(h₁, u₁)` and `(h₂, u₂)`: the larger of the two one-sided excess
    /// aggregates of the pointwise excesses (exact for decomposable sets).
    pub fn selection_excess(
        &self,
        h1: &Trajectory,
        u1: &Selection,
        h2: &Trajectory,
        u2: &Selection,
    ) -> Result<f64> {
        self.check_selection(u1)?;
        self.check_selection(u2)?;
        if h1.grid() != self.grid || h2.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let x1 = h1.add(&self.volterra_apply(u1)?)?;
        let x2 = h2.add(&self.volterra_apply(u2)?)?;
        let n = self.grid.subintervals();
        let mut forward = Vec::with_capacity(n);
        let mut backward = Vec::with_capacity(n);
        for j in 0..n {
            let a = self.field.eval(TimeSample::Subinterval(j), &x1.at_midpoint(j))?;
            let b = self.field.eval(TimeSample::Subinterval(j), &x2.at_midpoint(j))?;
            forward.push(excess(&a, &b)?);
            backward.push(excess(&b, &a)?);
        }
        let e12 = weighted_lp_aggregate(&forward, self.grid, &self.node_weights, self.exponent);
        let e21 = weighted_lp_aggregate(&backward, self.grid, &self.node_weights, self.exponent);
        Ok(e12.max(e21))
    }

    /// Measured contraction ratio
    /// `d_H(G(h,u₁), G(h,u₂)) / |||u₁ − u₂|||_p` for the instance's own `h`.
    /// Under consistent data the ratio stays below `2^{−1/p}` up to
    /// quadrature error.
    pub fn contraction_ratio_probe(&self, u1: &Selection, u2: &Selection) -> Result<f64> {
        if u1 == u2 {
            return Err(Error::IdenticalInputs);
        }
        let numerator =
            self.selection_excess(&self.inhomogeneity, u1, &self.inhomogeneity, u2)?;
        let denominator = self.weighted_norm(&u1.sub(u2)?)?;
        if denominator == 0.0 {
            return Err(Error::IdenticalInputs);
        }
        Ok(numerator / denominator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Coeff;
    use crate::presets;
    use crate::timebase::sup_norm;
    use crate::Matrix;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scalar(v: f64) -> Vector {
        Vector::from_vec(vec![v])
    }

    #[test]
    fn volterra_of_zero_is_zero() {
        let inst = presets::reference_interval(1.0, 16).unwrap();
        let v = inst.volterra_apply(&Selection::zeros(inst.grid(), 1)).unwrap();
        assert_eq!(sup_norm(&v), 0.0);
    }

    #[test]
    fn volterra_unit_kernel_unit_selection_is_time() {
        let inst = presets::reference_interval(1.0, 64).unwrap();
        let w = Selection::constant(inst.grid(), scalar(1.0));
        let v = inst.volterra_apply(&w).unwrap();
        for i in 0..=64 {
            assert_relative_eq!(v.value(i)[0], inst.grid().node(i), epsilon = 1e-14);
        }
    }

    #[test]
    fn volterra_exponential_kernel_closed_form() {
        // k(t,s) = e^{−(t−s)}, w ≡ 1: V(w)(t) = 1 − e^{−t}.
        let grid = Grid::new(1.0, 256).unwrap();
        let kernel = KernelOperator::exp_decay(1.0, Matrix::identity(1, 1));
        let field = SetField::scalar_interval(0.0, 0.0, 1.0).unwrap();
        let h = Trajectory::zeros(grid, 1);
        let inst = ProblemInstance::builder(kernel, field, h, 1.0).build().unwrap();
        let w = Selection::constant(grid, scalar(1.0));
        let v = inst.volterra_apply(&w).unwrap();
        for i in 0..=256 {
            let exact = 1.0 - (-grid.node(i)).exp();
            assert!((v.value(i)[0] - exact).abs() < 5e-5, "node {i}");
        }
    }

    #[test]
    fn volterra_is_linear() {
        let inst = presets::planar_ball_drift(24).unwrap();
        let grid = inst.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut random_selection = || {
            Selection::new(
                grid,
                (0..grid.subintervals())
                    .map(|_| Vector::from_fn(2, |_, _| rng.random_range(-2.0..2.0)))
                    .collect(),
            )
            .unwrap()
        };
        let w1 = random_selection();
        let w2 = random_selection();
        let (a, b) = (0.7, -1.3);
        let combined = Selection::new(
            grid,
            w1.values()
                .iter()
                .zip(w2.values())
                .map(|(x, y)| x * a + y * b)
                .collect(),
        )
        .unwrap();
        let lhs = inst.volterra_apply(&combined).unwrap();
        let rhs1 = inst.volterra_apply(&w1).unwrap();
        let rhs2 = inst.volterra_apply(&w2).unwrap();
        for i in 0..=grid.subintervals() {
            let expect = rhs1.value(i) * a + rhs2.value(i) * b;
            assert!((lhs.value(i) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn nemytskii_zero_for_members() {
        // F ≡ Ball(0,1) and w ≡ 0.
        let grid = Grid::new(1.0, 16).unwrap();
        let kernel = KernelOperator::scalar_constant(1.0);
        let field = SetField::affine_ball(
            Coeff::Constant(Matrix::zeros(1, 1)),
            Coeff::Constant(Vector::zeros(1)),
            Coeff::Constant(1.0),
        )
        .unwrap();
        let inst = ProblemInstance::builder(kernel, field, Trajectory::zeros(grid, 1), 1.0)
            .build()
            .unwrap();
        let w = Selection::zeros(grid, 1);
        let x = inst.trajectory_from(&w).unwrap();
        let (_, aggregate) = inst.nemytskii_residual(&x, &w).unwrap();
        assert_eq!(aggregate, 0.0);
    }

    #[test]
    fn nemytskii_unit_distance_from_point_field() {
        // F ≡ {0}, w ≡ 1, p = 1, T = 1: aggregate = 1.
        let grid = Grid::new(1.0, 32).unwrap();
        let kernel = KernelOperator::scalar_constant(1.0);
        let field = SetField::singleton(
            Coeff::Constant(Matrix::zeros(1, 1)),
            Coeff::Constant(Vector::zeros(1)),
        )
        .unwrap();
        let inst = ProblemInstance::builder(kernel, field, Trajectory::zeros(grid, 1), 1.0)
            .build()
            .unwrap();
        let w = Selection::constant(grid, scalar(1.0));
        let x = Trajectory::zeros(grid, 1);
        let (pointwise, aggregate) = inst.nemytskii_residual(&x, &w).unwrap();
        assert_relative_eq!(aggregate, 1.0, epsilon = 1e-13);
        assert!(pointwise.values()[..32].iter().all(|&d| (d - 1.0).abs() < 1e-14));
        assert_eq!(pointwise.value(32), 0.0);
    }

    #[test]
    fn nemytskii_margin_on_half_the_subintervals() {
        // Selection sits outside F(t, x(t)) by margin m on every even
        // subinterval: aggregate = m·T/2 at p = 1.
        let grid = Grid::new(1.0, 32).unwrap();
        let kernel = KernelOperator::scalar_constant(1.0);
        let field = SetField::scalar_interval(1.0, 0.0, 1.0).unwrap();
        let inst = ProblemInstance::builder(kernel, field, Trajectory::zeros(grid, 1), 1.0)
            .build()
            .unwrap();
        let x = Trajectory::zeros(grid, 1);
        let margin = 0.25;
        let w = Selection::new(
            grid,
            (0..32)
                .map(|j| scalar(if j % 2 == 0 { 1.0 + margin } else { 0.0 }))
                .collect(),
        )
        .unwrap();
        let (_, aggregate) = inst.nemytskii_residual(&x, &w).unwrap();
        assert_relative_eq!(aggregate, margin * 0.5, epsilon = 1e-13);
    }

    #[test]
    fn projection_step_fixes_feasible_selections() {
        let inst = presets::reference_interval(1.0, 32).unwrap();
        let u = Selection::zeros(inst.grid(), 1); // 0 ∈ [x−1, x+1] along x = 0
        let stepped = inst.gp_project_step(&u).unwrap();
        assert_eq!(stepped, u);
    }

    #[test]
    fn projection_step_collapses_on_point_fields() {
        let grid = Grid::new(1.0, 16).unwrap();
        let kernel = KernelOperator::scalar_constant(1.0);
        let field = SetField::singleton(
            Coeff::Constant(Matrix::zeros(1, 1)),
            Coeff::Constant(Vector::zeros(1)),
        )
        .unwrap();
        let inst = ProblemInstance::builder(kernel, field, Trajectory::zeros(grid, 1), 1.0)
            .build()
            .unwrap();
        let u = Selection::constant(grid, scalar(7.5));
        let stepped = inst.gp_project_step(&u).unwrap();
        assert_eq!(stepped, Selection::zeros(grid, 1));
    }

    #[test]
    fn projection_step_clamps_against_drifted_tube() {
        // F(t,x) = [x−1, x+1], k ≡ 1, h ≡ 0, u ≡ 5: V(u)(t) = 5t and the
        // step clamps 5 into [5t−1, 5t+1] at each subinterval midpoint.
        let inst = presets::reference_interval(1.0, 16).unwrap();
        let grid = inst.grid();
        let u = Selection::constant(grid, scalar(5.0));
        let stepped = inst.gp_project_step(&u).unwrap();
        for j in 0..16 {
            let mid = grid.midpoint(j);
            let expected = 5.0f64.clamp(5.0 * mid - 1.0, 5.0 * mid + 1.0);
            assert_relative_eq!(stepped.value(j)[0], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn projection_step_output_is_grid_exact_member() {
        let inst = presets::reference_interval(2.0, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let u = Selection::new(
                inst.grid(),
                (0..64)
                    .map(|_| scalar(rng.random_range(-3.0..3.0)))
                    .collect(),
            )
            .unwrap();
            let x = inst.trajectory_from(&u).unwrap();
            let stepped = inst.gp_project_step(&u).unwrap();
            let (_, aggregate) = inst.nemytskii_residual(&x, &stepped).unwrap();
            assert_eq!(aggregate, 0.0, "projection must land exactly in the set");
        }
    }

    #[test]
    fn identical_probe_inputs_are_rejected() {
        let inst = presets::reference_interval(1.0, 16).unwrap();
        let u = Selection::constant(inst.grid(), scalar(1.0));
        assert!(matches!(
            inst.contraction_ratio_probe(&u, &u),
            Err(Error::IdenticalInputs)
        ));
    }

    #[test]
    fn probe_vanishes_for_point_fields() {
        let grid = Grid::new(1.0, 16).unwrap();
        let kernel = KernelOperator::scalar_constant(1.0);
        let field = SetField::singleton(
            Coeff::Constant(Matrix::zeros(1, 1)),
            Coeff::Constant(Vector::zeros(1)),
        )
        .unwrap();
        let inst = ProblemInstance::builder(kernel, field, Trajectory::zeros(grid, 1), 1.0)
            .build()
            .unwrap();
        let u1 = Selection::constant(grid, scalar(1.0));
        let u2 = Selection::zeros(grid, 1);
        let ratio = inst.contraction_ratio_probe(&u1, &u2).unwrap();
        assert_eq!(ratio, 0.0);
    }

    #[test]
    fn reference_probe_stays_below_half_plus_tolerance() {
        // u₁ ≡ 1, u₂ ≡ 0: pointwise Hausdorff |V(Δu)(t)| = t; the measured
        // ratio must respect the contraction constant 1/2 at p = 1.
        let inst = presets::reference_interval(1.0, 256).unwrap();
        let u1 = Selection::constant(inst.grid(), scalar(1.0));
        let u2 = Selection::zeros(inst.grid(), 1);
        let ratio = inst.contraction_ratio_probe(&u1, &u2).unwrap();
        assert!(ratio <= 0.5 + 0.05, "ratio {ratio}");
        assert!(ratio > 0.0);
    }

    #[test]
    fn seeded_pairs_respect_contraction_bound() {
        for p in [1.0, 2.0] {
            let inst = presets::reference_interval(p, 128).unwrap();
            let bound = (2.0f64).powf(-1.0 / p) + 0.05;
            let mut rng = ChaCha8Rng::seed_from_u64(40);
            for _ in 0..20 {
                let u1 = Selection::new(
                    inst.grid(),
                    (0..128).map(|_| scalar(rng.random_range(-2.0..2.0))).collect(),
                )
                .unwrap();
                let u2 = Selection::new(
                    inst.grid(),
                    (0..128).map(|_| scalar(rng.random_range(-2.0..2.0))).collect(),
                )
                .unwrap();
                let ratio = inst.contraction_ratio_probe(&u1, &u2).unwrap();
                assert!(ratio <= bound, "p = {p}: ratio {ratio} > {bound}");
            }
        }
    }

    #[test]
    fn two_variable_excess_respects_contraction_bound() {
        let inst = presets::reference_interval(1.0, 128).unwrap();
        let grid = inst.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let h1 = Trajectory::constant(grid, scalar(rng.random_range(-1.0..1.0)));
            let h2 = Trajectory::constant(grid, scalar(rng.random_range(-1.0..1.0)));
            let u1 = Selection::new(
                grid,
                (0..128).map(|_| scalar(rng.random_range(-2.0..2.0))).collect(),
            )
            .unwrap();
            let u2 = Selection::new(
                grid,
                (0..128).map(|_| scalar(rng.random_range(-2.0..2.0))).collect(),
            )
            .unwrap();
            let measured = inst.selection_excess(&h1, &u1, &h2, &u2).unwrap();
            let p = inst.exponent();
            let dh = sup_norm(&h1.sub(&h2).unwrap());
            let du = inst.weighted_norm(&u1.sub(&u2).unwrap()).unwrap();
            let bound = (0.5 * (dh.powf(p) + du.powf(p))).powf(1.0 / p);
            assert!(
                measured <= bound * 1.05 + 1e-12,
                "measured {measured} vs bound {bound}"
            );
        }
    }

    #[test]
    fn with_inhomogeneity_shares_grid_and_weights() {
        let inst = presets::reference_interval(1.0, 32).unwrap();
        let shifted = inst
            .with_inhomogeneity(Trajectory::constant(inst.grid(), scalar(2.0)))
            .unwrap();
        assert_eq!(shifted.weight_constant(), inst.weight_constant());
        assert_eq!(shifted.inhomogeneity().value(0)[0], 2.0);
        let bad = Trajectory::zeros(Grid::new(1.0, 16).unwrap(), 1);
        assert!(inst.with_inhomogeneity(bad).is_err());
    }
}
