//! Uniform time grids, quadrature and norms for grid-sampled functions.
//!
//! Three sampled function types share a [`Grid`]:
//!
//! - [`Selection`] — one state vector per subinterval, piecewise constant on
//!   left-closed subintervals (integrable candidates `w`),
//! - [`Trajectory`] — one state vector per node, piecewise linear
//!   (continuous candidates `x`),
//! - [`ScalarTable`] — one real per node (Lipschitz moduli, growth bounds,
//!   weights, ...).
//!
//! Quadrature rules are matched to the interpolation classes: one-value-per
//! -subinterval sums for selection integrands (exact on piecewise constants)
//! and the composite trapezoid rule for node tables (exact on piecewise
//! affine tables). Where both meet — the weighted norm — node weights are
//! averaged onto subintervals.

use crate::{Error, Result, Vector};

/// Uniform partition of `[0, T]` into `N ≥ 2` subintervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    horizon: f64,
    subintervals: usize,
}

impl Grid {
    pub fn new(horizon: f64, subintervals: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidGrid(format!("horizon T = {horizon} must be positive")));
        }
        if subintervals < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 subintervals, got {subintervals}"
            )));
        }
        Ok(Self { horizon, subintervals })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of subintervals `N`; the grid has `N + 1` nodes.
    pub fn subintervals(&self) -> usize {
        self.subintervals
    }

    pub fn node_count(&self) -> usize {
        self.subintervals + 1
    }

    /// Constant spacing `T / N`.
    pub fn spacing(&self) -> f64 {
        self.horizon / self.subintervals as f64
    }

    /// Node `t_i = i·T/N`.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.horizon / self.subintervals as f64
    }

    /// Midpoint of subinterval `j`, the sampling time of per-subinterval data.
    pub fn midpoint(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.horizon / self.subintervals as f64
    }

    /// Dyadic refinement: same horizon, doubled subinterval count.
    pub fn refine(&self) -> Self {
        Self { horizon: self.horizon, subintervals: self.subintervals * 2 }
    }

    pub(crate) fn check_node(&self, i: usize) -> Result<()> {
        if i < self.node_count() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.node_count() })
        }
    }
}

fn check_finite_rows(rows: &[Vector], what: &str) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{what} row {i}")));
        }
    }
    Ok(())
}

/// Piecewise-constant integrable function: one value per subinterval.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    grid: Grid,
    values: Vec<Vector>,
}

impl Selection {
    pub fn new(grid: Grid, values: Vec<Vector>) -> Result<Self> {
        if values.len() != grid.subintervals() {
            return Err(Error::InvalidInput(format!(
                "selection needs {} rows, got {}",
                grid.subintervals(),
                values.len()
            )));
        }
        check_finite_rows(&values, "selection")?;
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid, value: Vector) -> Self {
        let values = vec![value; grid.subintervals()];
        Self { grid, values }
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        Self::constant(grid, Vector::zeros(dim))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vector::len)
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn value(&self, j: usize) -> &Vector {
        &self.values[j]
    }

    /// `self − other`, used by norm-based stopping criteria and probes.
    pub fn sub(&self, other: &Selection) -> Result<Selection> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Selection { grid: self.grid, values })
    }

    pub fn scale(&self, factor: f64) -> Selection {
        Selection {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Largest pointwise Euclidean norm; convergence bookkeeping only.
    pub fn max_pointwise_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Piecewise-linear continuous function: one value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    values: Vec<Vector>,
}

impl Trajectory {
    pub fn new(grid: Grid, values: Vec<Vector>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidInput(format!(
                "trajectory needs {} rows, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        check_finite_rows(&values, "trajectory")?;
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid, value: Vector) -> Self {
        let values = vec![value; grid.node_count()];
        Self { grid, values }
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        Self::constant(grid, Vector::zeros(dim))
    }

    /// Sample a closed-form curve at the grid nodes.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Vector) -> Self {
        let values = (0..grid.node_count()).map(|i| f(grid.node(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vector::len)
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &Vector {
        &self.values[i]
    }

    /// Piecewise-linear value at the midpoint of subinterval `j`.
    pub fn at_midpoint(&self, j: usize) -> Vector {
        (&self.values[j] + &self.values[j + 1]) * 0.5
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Trajectory { grid: self.grid, values })
    }

    pub fn add(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Trajectory { grid: self.grid, values })
    }
}

/// Nonnegative node table for moduli, growth bounds and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTable {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarTable {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidInput(format!(
                "scalar table needs {} entries, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar table".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        let values = vec![value; grid.node_count()];
        Self { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.node_count()).map(|i| f(grid.node(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Linear interpolation at the midpoint of subinterval `j`.
    pub fn at_midpoint(&self, j: usize) -> f64 {
        0.5 * (self.values[j] + self.values[j + 1])
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Entrywise map, keeping the grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarTable {
        ScalarTable {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Validate a Lebesgue exponent `p ∈ [1, ∞)`.
pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// Conjugate exponent `q` with `1/p + 1/q = 1`; `q = ∞` when `p = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Composite trapezoid value of a node table over `[0, t_up_to]`.
///
/// Exact for tables that sample an affine function.
pub fn trapezoid_integrate(f: &ScalarTable, up_to: usize) -> Result<f64> {
    f.grid().check_node(up_to)?;
    let h = f.grid().spacing();
    let mut acc = 0.0;
    for i in 0..up_to {
        acc += 0.5 * h * (f.value(i) + f.value(i + 1));
    }
    Ok(acc)
}

/// Trapezoid value over the node range `[from, to]`.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn trapezoid_between(f: &ScalarTable, from: usize, to: usize) -> Result<f64> {
    f.grid().check_node(to)?;
    if from > to {
        return Err(Error::IndexOutOfRange { index: from, len: to + 1 });
    }
    let h = f.grid().spacing();
    let mut acc = 0.0;
    for i in from..to {
        acc += 0.5 * h * (f.value(i) + f.value(i + 1));
    }
    Ok(acc)
}

/// Plain L^p norm of a piecewise-constant selection:
/// `(Σ_j h·|w_j|^p)^{1/p}`, exact on the interpolation class.
pub fn lp_norm(w: &Selection, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let h = w.grid().spacing();
    let mut acc = 0.0;
    for v in w.values() {
        let n = v.norm();
        acc += h * if p == 1.0 { n } else { n.powf(p) };
    }
    Ok(if p == 1.0 { acc } else { acc.powf(1.0 / p) })
}

/// Node weights `exp(−2^{2p−1}·M·r(t_i))` of the equivalent weighted norm,
/// with `r(t) = ∫₀ᵗ α(s)^p ds` computed by the trapezoid rule.
pub fn bielecki_node_weights(alpha: &ScalarTable, weight_constant: f64, p: f64) -> Result<Vec<f64>> {
    check_exponent(p)?;
    if !(weight_constant.is_finite() && weight_constant >= 1.0) {
        return Err(Error::InvalidWeightConstant(weight_constant));
    }
    let rate = (2.0f64).powf(2.0 * p - 1.0) * weight_constant;
    let alpha_p = alpha.map(|a| a.powf(p));
    let h = alpha.grid().spacing();
    let mut weights = Vec::with_capacity(alpha.grid().node_count());
    let mut r = 0.0;
    weights.push(1.0);
    for i in 0..alpha.grid().subintervals() {
        r += 0.5 * h * (alpha_p.value(i) + alpha_p.value(i + 1));
        weights.push((-rate * r).exp());
    }
    Ok(weights)
}

/// Exponentially weighted L^p norm of a selection.
///
/// Node weights are averaged onto subintervals, so the full quadrature is
/// `(Σ_j h·(ω_j+ω_{j+1})/2·|w_j|^p)^{1/p}`.
pub fn bielecki_norm(w: &Selection, alpha: &ScalarTable, weight_constant: f64, p: f64) -> Result<f64> {
    if w.grid() != alpha.grid() {
        return Err(Error::GridMismatch);
    }
    let weights = bielecki_node_weights(alpha, weight_constant, p)?;
    Ok(bielecki_norm_with_weights(w, &weights, p))
}

/// Same norm with precomputed node weights (the solver hot path).
pub(crate) fn bielecki_norm_with_weights(w: &Selection, node_weights: &[f64], p: f64) -> f64 {
    let h = w.grid().spacing();
    let mut acc = 0.0;
    for (j, v) in w.values().iter().enumerate() {
        let omega = 0.5 * (node_weights[j] + node_weights[j + 1]);
        let n = v.norm();
        acc += h * omega * if p == 1.0 { n } else { n.powf(p) };
    }
    if p == 1.0 {
        acc
    } else {
        acc.powf(1.0 / p)
    }
}

/// Weighted L^p aggregate of per-subinterval scalars (excess tables).
pub(crate) fn weighted_lp_aggregate(values: &[f64], grid: Grid, node_weights: &[f64], p: f64) -> f64 {
    let h = grid.spacing();
    let mut acc = 0.0;
    for (j, &v) in values.iter().enumerate() {
        let omega = 0.5 * (node_weights[j] + node_weights[j + 1]);
        acc += h * omega * if p == 1.0 { v } else { v.powf(p) };
    }
    if p == 1.0 {
        acc
    } else {
        acc.powf(1.0 / p)
    }
}

/// Maximum norm over the nodes of a trajectory.
pub fn sup_norm(x: &Trajectory) -> f64 {
    x.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn scalar(v: f64) -> Vector {
        Vector::from_vec(vec![v])
    }

    #[test]
    fn grid_basics() {
        let g = Grid::new(2.0, 4).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(4), 2.0);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.refine().subintervals(), 8);
        assert!(Grid::new(0.0, 4).is_err());
        assert!(Grid::new(1.0, 1).is_err());
    }

    #[test]
    fn trapezoid_constant_is_exact() {
        for n in [2usize, 7, 100] {
            let g = Grid::new(2.0, n).unwrap();
            let f = ScalarTable::constant(g, 1.0);
            assert_relative_eq!(trapezoid_integrate(&f, n).unwrap(), 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn trapezoid_affine_is_exact() {
        let g = Grid::new(1.0, 4).unwrap();
        let f = ScalarTable::from_fn(g, |t| t);
        assert_relative_eq!(trapezoid_integrate(&f, 4).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn trapezoid_quadratic_error_bound() {
        // ∫₀¹ t² dt = 1/3; trapezoid error ≤ (T/N)²/12·max|f''| = 2e-5·(5/6).
        let g = Grid::new(1.0, 100).unwrap();
        let f = ScalarTable::from_fn(g, |t| t * t);
        let value = trapezoid_integrate(&f, 100).unwrap();
        assert!((value - 1.0 / 3.0).abs() < 2e-5);
    }

    #[test]
    fn trapezoid_index_out_of_range() {
        let g = Grid::new(1.0, 4).unwrap();
        let f = ScalarTable::constant(g, 1.0);
        assert!(matches!(
            trapezoid_integrate(&f, 5),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn trapezoid_additive_over_adjacent_ranges() {
        let g = Grid::new(3.0, 48).unwrap();
        let f = ScalarTable::from_fn(g, |t| (2.7 * t).sin().abs() + 0.3);
        for split in [1usize, 13, 30, 47] {
            let whole = trapezoid_integrate(&f, 48).unwrap();
            let left = trapezoid_integrate(&f, split).unwrap();
            let right = trapezoid_between(&f, split, 48).unwrap();
            assert_relative_eq!(whole, left + right, epsilon = 1e-13);
        }
    }

    #[test]
    fn lp_norm_trivia() {
        let g = Grid::new(2.0, 8).unwrap();
        let zero = Selection::zeros(g, 2);
        assert_eq!(lp_norm(&zero, 1.0).unwrap(), 0.0);

        let ones = Selection::constant(g, scalar(1.0));
        assert_relative_eq!(lp_norm(&ones, 1.0).unwrap(), 2.0, epsilon = 1e-14);

        let g1 = Grid::new(1.0, 16).unwrap();
        let w = Selection::constant(g1, Vector::from_vec(vec![3.0, 4.0]));
        assert_relative_eq!(lp_norm(&w, 2.0).unwrap(), 5.0, epsilon = 1e-13);

        assert!(matches!(lp_norm(&ones, 0.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn bielecki_reduces_to_lp_for_zero_modulus() {
        let g = Grid::new(1.5, 12).unwrap();
        let w = Selection::new(
            g,
            (0..12).map(|j| scalar(1.0 + j as f64)).collect(),
        )
        .unwrap();
        let alpha = ScalarTable::constant(g, 0.0);
        for p in [1.0, 2.0, 3.5] {
            assert_relative_eq!(
                bielecki_norm(&w, &alpha, 1.0, p).unwrap(),
                lp_norm(&w, p).unwrap(),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn bielecki_terminal_weight_p1() {
        // p = 1, M = 1, α ≡ 1: rate 2^{2p−1}M = 2, r(1) = 1, weight e⁻².
        let g = Grid::new(1.0, 10).unwrap();
        let alpha = ScalarTable::constant(g, 1.0);
        let weights = bielecki_node_weights(&alpha, 1.0, 1.0).unwrap();
        assert_relative_eq!(weights[10], (-2.0f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn bielecki_closed_form_p2() {
        // p = 2, M = 1, α ≡ 1, w ≡ 1: (∫₀¹ e^{−8t} dt)^{1/2} = ((1−e⁻⁸)/8)^{1/2}.
        // The subinterval-averaged weights are the trapezoid rule for e^{−8t},
        // so the quadrature error is ≤ 64/(12 N²) on the squared value.
        let n = 256;
        let g = Grid::new(1.0, n).unwrap();
        let alpha = ScalarTable::constant(g, 1.0);
        let w = Selection::constant(g, scalar(1.0));
        let value = bielecki_norm(&w, &alpha, 1.0, 2.0).unwrap();
        let exact = ((1.0 - (-8.0f64).exp()) / 8.0).sqrt();
        assert!((value - exact).abs() < 2e-4, "got {value}, want {exact}");
    }

    #[test]
    fn bielecki_rejects_small_weight_constant() {
        let g = Grid::new(1.0, 4).unwrap();
        let alpha = ScalarTable::constant(g, 1.0);
        let w = Selection::constant(g, scalar(1.0));
        assert!(matches!(
            bielecki_norm(&w, &alpha, 0.5, 1.0),
            Err(Error::InvalidWeightConstant(_))
        ));
    }

    #[test]
    fn bielecki_rejects_grid_mismatch() {
        let g = Grid::new(1.0, 4).unwrap();
        let other = Grid::new(1.0, 8).unwrap();
        let alpha = ScalarTable::constant(other, 1.0);
        let w = Selection::constant(g, scalar(1.0));
        assert!(matches!(
            bielecki_norm(&w, &alpha, 1.0, 1.0),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn sup_norm_examples() {
        let g = Grid::new(1.0, 8).unwrap();
        assert_eq!(sup_norm(&Trajectory::zeros(g, 3)), 0.0);

        let x = Trajectory::from_fn(g, |t| Vector::from_vec(vec![t, -t]));
        assert_relative_eq!(sup_norm(&x), 2f64.sqrt(), epsilon = 1e-14);

        let g = Grid::new(1.0, 256).unwrap();
        let x = Trajectory::from_fn(g, |t| scalar((std::f64::consts::PI * t).sin()));
        assert!((sup_norm(&x) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn selection_row_count_enforced() {
        let g = Grid::new(1.0, 4).unwrap();
        assert!(Selection::new(g, vec![scalar(0.0); 5]).is_err());
        assert!(Trajectory::new(g, vec![scalar(0.0); 4]).is_err());
        assert!(Selection::new(g, vec![scalar(f64::NAN); 4]).is_err());
    }

    proptest! {
        #[test]
        fn lp_norm_is_absolutely_homogeneous(
            vals in proptest::collection::vec(-50.0f64..50.0, 8),
            a in -4.0f64..4.0,
            p in 1.0f64..4.0,
        ) {
            let g = Grid::new(1.0, 8).unwrap();
            let w = Selection::new(g, vals.iter().map(|&v| scalar(v)).collect()).unwrap();
            let lhs = lp_norm(&w.scale(a), p).unwrap();
            let rhs = a.abs() * lp_norm(&w, p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + rhs));
        }

        #[test]
        fn weighted_norm_is_equivalent_to_plain(
            vals in proptest::collection::vec(-10.0f64..10.0, 16),
            alpha0 in 0.0f64..2.0,
            alpha1 in 0.0f64..2.0,
            m in 1.0f64..3.0,
            p in 1.0f64..3.0,
        ) {
            let g = Grid::new(1.0, 16).unwrap();
            let w = Selection::new(g, vals.iter().map(|&v| scalar(v)).collect()).unwrap();
            // αᵖ is piecewise linear only for p = 1, but the two-sided bound
            // only needs the node weights to lie in [w(T), 1], which holds for
            // any nonnegative α table.
            let alpha = ScalarTable::from_fn(g, |t| alpha0 + (alpha1 - alpha0) * t);
            let weighted = bielecki_norm(&w, &alpha, m, p).unwrap();
            let plain = lp_norm(&w, p).unwrap();
            prop_assert!(weighted <= plain * (1.0 + 1e-12) + 1e-12);

            let alpha_p = alpha.map(|a| a.powf(p));
            let r_total = trapezoid_integrate(&alpha_p, 16).unwrap();
            let floor = (-(2.0f64).powf(2.0 * p - 1.0) * m * r_total / p).exp();
            prop_assert!(weighted >= floor * plain - 1e-12 * (1.0 + plain));
        }

        #[test]
        fn trapezoid_additivity_random_split(
            vals in proptest::collection::vec(0.0f64..5.0, 21),
            split in 0usize..21,
        ) {
            let g = Grid::new(2.0, 20).unwrap();
            let f = ScalarTable::new(g, vals).unwrap();
            let whole = trapezoid_integrate(&f, 20).unwrap();
            let left = trapezoid_integrate(&f, split).unwrap();
            let right = trapezoid_between(&f, split, 20).unwrap();
            prop_assert!((whole - left - right).abs() <= 1e-12 * (1.0 + whole.abs()));
        }
    }
}
