//! Sampling the solution set (the funnel of trajectories through one
//! inhomogeneity), envelope oracles for scalar problems, upper-semicontinuity
//! probes, and step-multifunction approximations of metric projections onto
//! moving convex tubes.
//!
//! Funnel coverage comes from bang-bang seeds: per block of subintervals a
//! random direction selects an extreme point of the field value. Each seed is
//! first driven to the fixed point of its own extremal map (the direction
//! pattern is reapplied to the current field value, so the limit stays on the
//! extreme boundary it aims at), then handed to the projection solver, which
//! certifies it as a grid-exact solution. Plain projection from a raw seed
//! would park at the nearest interior solution and systematically miss the
//! funnel boundary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::convex::ConvexRegion;
use crate::fields::TimeSample;
use crate::operators::ProblemInstance;
use crate::solvers::{picard_solve, single_valued_solve, SolveReport, DEFAULT_MAX_ITERATIONS};
use crate::timebase::{sup_norm, Grid, Selection, Trajectory};
use crate::{Error, Result, Vector};

/// A bang-bang seed: an extreme-valued selection plus the direction pattern
/// that generated it (one direction per subinterval).
#[derive(Debug, Clone)]
pub struct BangBangSeed {
    pub id: usize,
    pub selection: Selection,
    directions: Vec<Vector>,
}

impl BangBangSeed {
    pub fn directions(&self) -> &[Vector] {
        &self.directions
    }
}

fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    loop {
        let v = Vector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Draw `count` extreme-valued selections of `F(·, h(·))`.
///
/// Each seed picks one random direction per block of subintervals
/// (`block_len` defaults to the whole horizon) and takes the extreme point
/// of the field value in that direction — box vertices, ball boundary
/// points. Deterministic under `rng_seed`.
pub fn bang_bang_seeds(
    inst: &ProblemInstance,
    count: usize,
    rng_seed: u64,
    block_len: Option<usize>,
) -> Result<Vec<BangBangSeed>> {
    if count == 0 {
        return Err(Error::InvalidInput("need at least one seed".into()));
    }
    let grid = inst.grid();
    let n = grid.subintervals();
    let block = block_len.unwrap_or(n).max(1);
    let dim = inst.dim();
    let h = inst.inhomogeneity();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut seeds = Vec::with_capacity(count);
    for id in 0..count {
        let mut directions = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        let mut current = random_unit_vector(&mut rng, dim);
        for j in 0..n {
            if j % block == 0 && j > 0 {
                current = random_unit_vector(&mut rng, dim);
            }
            let region = inst.field().eval(TimeSample::Subinterval(j), &h.at_midpoint(j))?;
            values.push(region.support_point(&current)?);
            directions.push(current.clone());
        }
        seeds.push(BangBangSeed { id, selection: Selection::new(grid, values)?, directions });
    }
    Ok(seeds)
}

/// Fixed point of the extremal map `u_j ← argmax_{y ∈ F(mid_j, x(mid_j))}
/// ⟨e_j, y⟩` for a frozen direction pattern. Converges by the same
/// weighted-norm contraction as the projection step and lands on the
/// extreme boundary selected by the pattern.
fn extremal_fixed_point(
    inst: &ProblemInstance,
    directions: &[Vector],
    u0: &Selection,
    tol: f64,
) -> Result<(Selection, bool)> {
    let n = inst.grid().subintervals();
    let mut u = u0.clone();
    let mut converged = false;
    for _ in 0..DEFAULT_MAX_ITERATIONS {
        let x = inst.trajectory_from(&u)?;
        let mut values = Vec::with_capacity(n);
        for (j, direction) in directions.iter().enumerate().take(n) {
            let region = inst.field().eval(TimeSample::Subinterval(j), &x.at_midpoint(j))?;
            values.push(region.support_point(direction)?);
        }
        let next = Selection::new(inst.grid(), values)?;
        let increment = inst.weighted_norm(&next.sub(&u)?)?;
        if !increment.is_finite() {
            return Err(Error::NumericalBreakdown("extremal refinement diverged".into()));
        }
        u = next;
        if increment <= tol {
            converged = true;
            break;
        }
    }
    Ok((u, converged))
}

/// One converged funnel member.
#[derive(Debug, Clone)]
pub struct FunnelEntry {
    pub seed_id: usize,
    pub selection: Selection,
    pub trajectory: Trajectory,
    pub report: SolveReport,
}

/// Componentwise cross-section statistics at one node.
#[derive(Debug, Clone)]
pub struct CrossSection {
    pub min: Vector,
    pub max: Vector,
    pub centroid: Vector,
}

/// Sampled slice of the solution set.
#[derive(Debug, Clone)]
pub struct FunnelSample {
    pub entries: Vec<FunnelEntry>,
    /// Seed ids whose solve did not converge.
    pub failures: Vec<usize>,
    /// Per-node statistics over the converged trajectories.
    pub cross_sections: Vec<CrossSection>,
}

/// Sample the solution set from `count` bang-bang seeds: each seed is
/// refined to its extremal fixed point and then certified by the projection
/// solver. Per-seed non-convergence is recorded; at least one seed must
/// converge. `jobs > 1` solves seeds in parallel with a deterministic merge
/// by seed id.
pub fn sample_funnel(
    inst: &ProblemInstance,
    count: usize,
    rng_seed: u64,
    tol: f64,
    jobs: usize,
) -> Result<FunnelSample> {
    let seeds = bang_bang_seeds(inst, count, rng_seed, None)?;
    let solve_one = |seed: &BangBangSeed| -> Result<(usize, Option<FunnelEntry>)> {
        let (refined, _) = extremal_fixed_point(inst, &seed.directions, &seed.selection, tol)?;
        let (u, x, report) = picard_solve(inst, &refined, tol, DEFAULT_MAX_ITERATIONS)?;
        if report.converged {
            Ok((seed.id, Some(FunnelEntry { seed_id: seed.id, selection: u, trajectory: x, report })))
        } else {
            Ok((seed.id, None))
        }
    };
    let mut outcomes: Vec<(usize, Option<FunnelEntry>)> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot build thread pool: {e}")))?;
        pool.install(|| seeds.par_iter().map(solve_one).collect::<Result<Vec<_>>>())?
    } else {
        seeds.iter().map(solve_one).collect::<Result<Vec<_>>>()?
    };
    outcomes.sort_by_key(|(id, _)| *id);

    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (id, outcome) in outcomes {
        match outcome {
            Some(entry) => entries.push(entry),
            None => failures.push(id),
        }
    }
    if entries.is_empty() {
        return Err(Error::EmptyFunnel);
    }
    let cross_sections = cross_sections(inst.grid(), &entries);
    Ok(FunnelSample { entries, failures, cross_sections })
}

fn cross_sections(grid: Grid, entries: &[FunnelEntry]) -> Vec<CrossSection> {
    let dim = entries[0].trajectory.dim();
    (0..grid.node_count())
        .map(|i| {
            let mut min = Vector::from_element(dim, f64::INFINITY);
            let mut max = Vector::from_element(dim, f64::NEG_INFINITY);
            let mut centroid = Vector::zeros(dim);
            for entry in entries {
                let v = entry.trajectory.value(i);
                for c in 0..dim {
                    min[c] = min[c].min(v[c]);
                    max[c] = max[c].max(v[c]);
                }
                centroid += v;
            }
            centroid /= entries.len() as f64;
            CrossSection { min, max, centroid }
        })
        .collect()
}

/// Envelope trajectories of a scalar monotone problem: the solves of the two
/// single-valued endpoint equations `f∓(t,x) = C(t)x + d(t) ∓ size(t)`.
///
/// Preconditions checked on samples: scalar state, kernel nonnegative on the
/// triangle, interval endpoints monotone in the state (nonnegative state
/// coefficient). For fields without endpoint monotonicity the extremal
/// equations need not bound the funnel, so the oracle refuses.
pub fn scalar_envelope_oracle(
    inst: &ProblemInstance,
    tol: f64,
) -> Result<(Trajectory, Trajectory)> {
    if inst.dim() != 1 {
        return Err(Error::EnvelopeOracle(format!(
            "scalar oracle on a {}-dimensional problem",
            inst.dim()
        )));
    }
    let grid = inst.grid();
    // kernel sign on sampled triangle points
    for i in 0..=grid.subintervals() {
        let value = inst.kernel().eval(grid.node(i), 0.0)?[(0, 0)];
        if value < 0.0 {
            return Err(Error::EnvelopeOracle(format!(
                "kernel negative at (t, s) = ({}, 0): {value}",
                grid.node(i)
            )));
        }
    }
    // endpoint monotonicity in the state at every node
    let lo = Vector::from_vec(vec![0.0]);
    let hi = Vector::from_vec(vec![1.0]);
    for i in 0..grid.node_count() {
        let at = TimeSample::Node(i);
        let region_lo = inst.field().eval(at, &lo)?;
        let region_hi = inst.field().eval(at, &hi)?;
        let upper = |r: &ConvexRegion| r.support_point(&Vector::from_vec(vec![1.0])).map(|v| v[0]);
        let lower = |r: &ConvexRegion| r.support_point(&Vector::from_vec(vec![-1.0])).map(|v| v[0]);
        if upper(&region_hi)? < upper(&region_lo)? - 1e-12
            || lower(&region_hi)? < lower(&region_lo)? - 1e-12
        {
            return Err(Error::EnvelopeOracle(format!(
                "interval endpoints decrease in the state at t = {}",
                grid.node(i)
            )));
        }
    }

    let lower_inst = inst.with_field(inst.field().scalar_endpoint_field(false)?)?;
    let upper_inst = inst.with_field(inst.field().scalar_endpoint_field(true)?)?;
    let (x_min, _) = single_valued_solve(&lower_inst, tol)?;
    let (x_max, _) = single_valued_solve(&upper_inst, tol)?;
    Ok((x_min, x_max))
}

/// Exhaustive coverage of per-subinterval extreme-point patterns for scalar
/// problems on coarse grids: each of the `2^N` sign patterns is driven to
/// its extremal fixed point. The per-node hull of the results is the
/// discrete reachable interval.
pub fn enumerate_extreme_solutions(inst: &ProblemInstance, tol: f64) -> Result<Vec<Trajectory>> {
    if inst.dim() != 1 {
        return Err(Error::InvalidInput("exhaustive enumeration is scalar-only".into()));
    }
    let n = inst.grid().subintervals();
    if n > 20 {
        return Err(Error::InvalidInput(format!(
            "2^{n} extreme patterns is beyond the enumeration cap (N ≤ 20)"
        )));
    }
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0..(1usize << n) {
        let directions: Vec<Vector> = (0..n)
            .map(|j| {
                Vector::from_vec(vec![if mask & (1 << j) != 0 { 1.0 } else { -1.0 }])
            })
            .collect();
        let u0 = Selection::zeros(inst.grid(), 1);
        let (u, converged) = extremal_fixed_point(inst, &directions, &u0, tol)?;
        if !converged {
            return Err(Error::NumericalBreakdown(format!(
                "extreme pattern {mask:b} did not converge"
            )));
        }
        out.push(inst.trajectory_from(&u)?);
    }
    Ok(out)
}

/// One-sided sup-norm excess between the funnels of two inhomogeneities,
/// sampled with identical seeds: `max over x₁ ∈ S(h₁) of min over
/// x₂ ∈ S(h₂) of ‖x₁ − x₂‖`. A proxy for upper semicontinuity of the
/// solution set map: it must vanish as `‖h₁ − h₂‖ → 0`.
pub fn usc_probe(
    inst: &ProblemInstance,
    h1: &Trajectory,
    h2: &Trajectory,
    count: usize,
    rng_seed: u64,
    tol: f64,
) -> Result<f64> {
    let sample1 = sample_funnel(&inst.with_inhomogeneity(h1.clone())?, count, rng_seed, tol, 1)?;
    let sample2 = sample_funnel(&inst.with_inhomogeneity(h2.clone())?, count, rng_seed, tol, 1)?;
    let mut worst = 0.0f64;
    for e1 in &sample1.entries {
        let mut nearest = f64::INFINITY;
        for e2 in &sample2.entries {
            nearest = nearest.min(sup_norm(&e1.trajectory.sub(&e2.trajectory)?));
        }
        worst = worst.max(nearest);
    }
    Ok(worst)
}

/// Moving tube of convex slices, one per node, interpolated between nodes.
#[derive(Debug, Clone)]
pub struct Tube {
    grid: Grid,
    slices: Vec<ConvexRegion>,
}

impl Tube {
    /// All slices must share dimension and variant (interpolation between
    /// nodes blends centers and sizes of like regions).
    pub fn new(grid: Grid, slices: Vec<ConvexRegion>) -> Result<Self> {
        if slices.len() != grid.node_count() {
            return Err(Error::InvalidInput(format!(
                "tube needs {} slices, got {}",
                grid.node_count(),
                slices.len()
            )));
        }
        let dim = slices[0].dim();
        let same_variant = slices.windows(2).all(|w| {
            std::mem::discriminant(&w[0]) == std::mem::discriminant(&w[1])
        });
        if !same_variant {
            return Err(Error::InvalidInput("tube slices must share one region variant".into()));
        }
        if slices.iter().any(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: 0 });
        }
        Ok(Self { grid, slices })
    }

    /// Scalar tube from interval endpoints sampled at the nodes.
    pub fn from_scalar_intervals(grid: Grid, f: impl Fn(f64) -> (f64, f64)) -> Result<Self> {
        let slices = (0..grid.node_count())
            .map(|i| {
                let (lo, hi) = f(grid.node(i));
                ConvexRegion::interval(lo, hi)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, slices)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn slice(&self, i: usize) -> &ConvexRegion {
        &self.slices[i]
    }

    /// Slice at an arbitrary time, interpolating centers and sizes linearly
    /// between the bracketing nodes.
    pub fn slice_at(&self, t: f64) -> Result<ConvexRegion> {
        let horizon = self.grid.horizon();
        if !(0.0..=horizon).contains(&t) {
            return Err(Error::InvalidInput(format!("time {t} outside [0, {horizon}]")));
        }
        let position = t / self.grid.spacing();
        let i = (position.floor() as usize).min(self.grid.subintervals() - 1);
        let lambda = position - i as f64;
        Ok(blend(&self.slices[i], &self.slices[i + 1], lambda))
    }
}

fn blend(a: &ConvexRegion, b: &ConvexRegion, lambda: f64) -> ConvexRegion {
    use ConvexRegion::*;
    let mix = |x: &Vector, y: &Vector| x * (1.0 - lambda) + y * lambda;
    match (a, b) {
        (Point { center: c1 }, Point { center: c2 }) => Point { center: mix(c1, c2) },
        (Ball { center: c1, radius: r1 }, Ball { center: c2, radius: r2 }) => Ball {
            center: mix(c1, c2),
            radius: (1.0 - lambda) * r1 + lambda * r2,
        },
        (Box { center: c1, half_widths: h1 }, Box { center: c2, half_widths: h2 }) => Box {
            center: mix(c1, c2),
            half_widths: mix(h1, h2),
        },
        (Segment { start: s1, end: e1 }, Segment { start: s2, end: e2 }) => Segment {
            start: mix(s1, s2),
            end: mix(e1, e2),
        },
        _ => unreachable!("tube construction enforces a uniform variant"),
    }
}

/// Metric projection of a point onto the tube slice at time `t`.
pub fn tube_project(y: &Vector, tube: &Tube, t: f64) -> Result<Vector> {
    tube.slice_at(t)?.project(y)
}

/// Step-multifunction approximation of the moving projection at dyadic
/// level `n`: on each of the `2^n` windows, the smallest axis-aligned box
/// containing the per-node projections of `x` over the window. Returned per
/// node (each node carries its window's hull; window-edge nodes belong to
/// the window on their left, except node 0). Hulls are nested across levels
/// and shrink to the pointwise projection as `n` grows.
pub fn step_multifunction(tube: &Tube, x: &Vector, level: u32) -> Result<Vec<ConvexRegion>> {
    let n = tube.grid().subintervals();
    let windows = 1usize << level;
    if !n.is_multiple_of(windows) {
        return Err(Error::DyadicLevel { level, subintervals: n });
    }
    let per_window = n / windows;
    let dim = tube.slice(0).dim();
    if x.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
    }

    let mut hulls = Vec::with_capacity(windows);
    for w in 0..windows {
        let mut min = Vector::from_element(dim, f64::INFINITY);
        let mut max = Vector::from_element(dim, f64::NEG_INFINITY);
        for node in w * per_window..=(w + 1) * per_window {
            let projection = tube.slice(node).project(x)?;
            for c in 0..dim {
                min[c] = min[c].min(projection[c]);
                max[c] = max[c].max(projection[c]);
            }
        }
        hulls.push(ConvexRegion::aligned_box(
            (&min + &max) * 0.5,
            (&max - &min) * 0.5,
        )?);
    }

    Ok((0..=n)
        .map(|node| {
            let w = if node == 0 { 0 } else { (node - 1) / per_window };
            hulls[w].clone()
        })
        .collect())
}
