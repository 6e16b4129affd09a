//! Compact convex set values: support functions, Euclidean metric
//! projection, distances and Hausdorff/excess computations.
//!
//! The variant algebra is deliberately small — points, balls, axis-aligned
//! boxes and segments — so that projections and support functions have exact
//! closed forms and the solvers never depend on an external optimizer.
//! Excess between two regions is exact for same-variant pairs (and whenever
//! one side is a point); cross-variant pairs fall back to the support
//! characterization `e(A,B) = sup_{|e|=1}(h_A(e) − h_B(e))⁺` sampled on a
//! fixed [`DirectionNet`], which is a certified lower bound with an angular
//! resolution declared by the net.

use crate::{Error, Result, Vector};

/// Nonempty compact convex value of a set-valued right-hand side or tube.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexRegion {
    Point { center: Vector },
    Ball { center: Vector, radius: f64 },
    Box { center: Vector, half_widths: Vector },
    Segment { start: Vector, end: Vector },
}

impl ConvexRegion {
    pub fn point(center: Vector) -> Self {
        ConvexRegion::Point { center }
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidRegion(format!("ball radius {radius} must be ≥ 0")));
        }
        Ok(ConvexRegion::Ball { center, radius })
    }

    pub fn aligned_box(center: Vector, half_widths: Vector) -> Result<Self> {
        if half_widths.len() != center.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: half_widths.len(),
            });
        }
        if half_widths.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidRegion("box half-widths must be ≥ 0".into()));
        }
        Ok(ConvexRegion::Box { center, half_widths })
    }

    pub fn segment(start: Vector, end: Vector) -> Result<Self> {
        if start.len() != end.len() {
            return Err(Error::DimensionMismatch { expected: start.len(), got: end.len() });
        }
        Ok(ConvexRegion::Segment { start, end })
    }

    /// Scalar interval `[lo, hi]` as a one-dimensional box.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidRegion(format!("empty interval [{lo}, {hi}]")));
        }
        Self::aligned_box(
            Vector::from_vec(vec![0.5 * (lo + hi)]),
            Vector::from_vec(vec![0.5 * (hi - lo)]),
        )
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexRegion::Point { center } => center.len(),
            ConvexRegion::Ball { center, .. } => center.len(),
            ConvexRegion::Box { center, .. } => center.len(),
            ConvexRegion::Segment { start, .. } => start.len(),
        }
    }

    fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() })
        }
    }

    pub fn translate(&self, shift: &Vector) -> ConvexRegion {
        match self {
            ConvexRegion::Point { center } => ConvexRegion::Point { center: center + shift },
            ConvexRegion::Ball { center, radius } => ConvexRegion::Ball {
                center: center + shift,
                radius: *radius,
            },
            ConvexRegion::Box { center, half_widths } => ConvexRegion::Box {
                center: center + shift,
                half_widths: half_widths.clone(),
            },
            ConvexRegion::Segment { start, end } => ConvexRegion::Segment {
                start: start + shift,
                end: end + shift,
            },
        }
    }

    /// Exact membership test (closed regions, non-strict inequalities).
    pub fn contains(&self, y: &Vector) -> bool {
        match self {
            ConvexRegion::Point { center } => y == center,
            ConvexRegion::Ball { center, radius } => (y - center).norm() <= *radius,
            ConvexRegion::Box { center, half_widths } => (0..y.len())
                .all(|i| (y[i] - center[i]).abs() <= half_widths[i]),
            ConvexRegion::Segment { .. } => {
                let p = self.project_unchecked(y);
                &p == y
            }
        }
    }

    /// Support value `σ(e, S) = sup_{y∈S} ⟨e, y⟩`.
    pub fn support(&self, direction: &Direction) -> Result<f64> {
        let e = direction.unit();
        self.check_dim(e)?;
        Ok(match self {
            ConvexRegion::Point { center } => e.dot(center),
            ConvexRegion::Ball { center, radius } => e.dot(center) + radius,
            ConvexRegion::Box { center, half_widths } => {
                e.dot(center)
                    + (0..e.len()).map(|i| half_widths[i] * e[i].abs()).sum::<f64>()
            }
            ConvexRegion::Segment { start, end } => e.dot(start).max(e.dot(end)),
        })
    }

    /// Maximizer of `⟨e, ·⟩` over the region: the extreme point selected by a
    /// direction. Box ties on zero components resolve to the `+` vertex.
    pub fn support_point(&self, e: &Vector) -> Result<Vector> {
        self.check_dim(e)?;
        Ok(match self {
            ConvexRegion::Point { center } => center.clone(),
            ConvexRegion::Ball { center, radius } => {
                let n = e.norm();
                if n == 0.0 {
                    return Ok(center.clone());
                }
                let mut factor = *radius / n;
                let mut candidate = center + e * factor;
                while (&candidate - center).norm() > *radius {
                    factor *= 1.0 - f64::EPSILON;
                    candidate = center + e * factor;
                }
                candidate
            }
            ConvexRegion::Box { center, half_widths } => {
                let mut v = center.clone();
                for i in 0..v.len() {
                    v[i] += if e[i] >= 0.0 { half_widths[i] } else { -half_widths[i] };
                }
                v
            }
            ConvexRegion::Segment { start, end } => {
                if e.dot(end) >= e.dot(start) {
                    end.clone()
                } else {
                    start.clone()
                }
            }
        })
    }

    /// Unique Euclidean nearest point of the region.
    ///
    /// The result is an exact member: the ball branch re-tightens the radial
    /// factor until the floating-point norm test passes, which keeps the
    /// projection idempotent and membership residuals exactly zero.
    pub fn project(&self, y: &Vector) -> Result<Vector> {
        self.check_dim(y)?;
        Ok(self.project_unchecked(y))
    }

    fn project_unchecked(&self, y: &Vector) -> Vector {
        match self {
            ConvexRegion::Point { center } => center.clone(),
            ConvexRegion::Ball { center, radius } => {
                let offset = y - center;
                let dist = offset.norm();
                if dist <= *radius {
                    return y.clone();
                }
                let mut factor = radius / dist;
                let mut candidate = center + &offset * factor;
                while (&candidate - center).norm() > *radius {
                    factor *= 1.0 - f64::EPSILON;
                    candidate = center + &offset * factor;
                }
                candidate
            }
            ConvexRegion::Box { center, half_widths } => {
                let mut v = y.clone();
                for i in 0..v.len() {
                    v[i] = v[i]
                        .max(center[i] - half_widths[i])
                        .min(center[i] + half_widths[i]);
                }
                v
            }
            ConvexRegion::Segment { start, end } => {
                let axis = end - start;
                let len2 = axis.norm_squared();
                if len2 == 0.0 {
                    return start.clone();
                }
                let tau = ((y - start).dot(&axis) / len2).clamp(0.0, 1.0);
                start + axis * tau
            }
        }
    }

    /// Euclidean distance `d(y, S) = |y − project(y, S)|`; zero iff `y ∈ S`.
    pub fn distance(&self, y: &Vector) -> Result<f64> {
        Ok((y - self.project(y)?).norm())
    }

    /// `sup_{y∈S} |y|`, the farthest point norm (exact per variant).
    pub fn farthest_norm(&self) -> f64 {
        match self {
            ConvexRegion::Point { center } => center.norm(),
            ConvexRegion::Ball { center, radius } => center.norm() + radius,
            ConvexRegion::Box { center, half_widths } => (0..center.len())
                .map(|i| {
                    let v = center[i].abs() + half_widths[i];
                    v * v
                })
                .sum::<f64>()
                .sqrt(),
            ConvexRegion::Segment { start, end } => start.norm().max(end.norm()),
        }
    }
}

/// Unit vector of the state space, the argument of support functions.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    unit: Vector,
}

impl Direction {
    /// Normalizes the input; rejects near-zero vectors.
    pub fn new(v: Vector) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 1e-300) {
            return Err(Error::InvalidInput("direction must be a nonzero finite vector".into()));
        }
        let unit = v / n;
        debug_assert!((unit.norm() - 1.0).abs() < 1e-12);
        Ok(Self { unit })
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn axis(dim: usize, i: usize, positive: bool) -> Self {
        let mut v = Vector::zeros(dim);
        v[i] = if positive { 1.0 } else { -1.0 };
        Self { unit: v }
    }
}

/// Fixed deterministic set of unit directions used for cross-variant
/// excess bounds. Carries its own description so reports can state the
/// sampling resolution alongside any net-based number.
#[derive(Debug, Clone)]
pub struct DirectionNet {
    dim: usize,
    directions: Vec<Direction>,
}

impl DirectionNet {
    /// Standard net: `{−1, +1}` in dimension 1 (exact), 64 equispaced
    /// angles per plane pair in dimension 2, and `max(64·⌈d/2⌉, 32·d)`
    /// seeded unit vectors plus the signed axes in higher dimensions.
    pub fn standard(dim: usize) -> Self {
        assert!(dim >= 1, "direction net needs dim ≥ 1");
        let mut directions = Vec::new();
        match dim {
            1 => {
                directions.push(Direction::axis(1, 0, true));
                directions.push(Direction::axis(1, 0, false));
            }
            2 => {
                for k in 0..64 {
                    let angle = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
                    directions.push(Direction {
                        unit: Vector::from_vec(vec![angle.cos(), angle.sin()]),
                    });
                }
            }
            _ => {
                for i in 0..dim {
                    directions.push(Direction::axis(dim, i, true));
                    directions.push(Direction::axis(dim, i, false));
                }
                let target = (64 * dim.div_ceil(2)).max(32 * dim);
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6e_6574);
                while directions.len() < target {
                    let v = Vector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
                    let n = v.norm();
                    if n > 0.1 && n <= 1.0 {
                        directions.push(Direction { unit: v / n });
                    }
                }
            }
        }
        Self { dim, directions }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn describe(&self) -> String {
        format!("{} unit directions in dimension {}", self.len(), self.dim)
    }
}

fn same_dim(a: &ConvexRegion, b: &ConvexRegion) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(a.dim())
}

/// One-sided excess `e(A, B) = sup_{x∈A} d(x, B)`.
///
/// Exact for same-variant pairs and whenever one side is a point;
/// otherwise the support-function bound over [`DirectionNet::standard`].
pub fn excess(a: &ConvexRegion, b: &ConvexRegion) -> Result<f64> {
    let dim = same_dim(a, b)?;
    if let Some(v) = exact_excess(a, b)? {
        return Ok(v);
    }
    excess_on_net(a, b, &DirectionNet::standard(dim))
}

/// Support-sampled excess on an explicit net (always a lower bound of the
/// true excess for convex compact regions).
pub fn excess_on_net(a: &ConvexRegion, b: &ConvexRegion, net: &DirectionNet) -> Result<f64> {
    same_dim(a, b)?;
    if net.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: net.dim() });
    }
    let mut worst = 0.0f64;
    for e in net.directions() {
        let gap = a.support(e)? - b.support(e)?;
        worst = worst.max(gap);
    }
    Ok(worst)
}

fn exact_excess(a: &ConvexRegion, b: &ConvexRegion) -> Result<Option<f64>> {
    use ConvexRegion::*;
    let value = match (a, b) {
        (Point { center }, _) => Some(b.distance(center)?),
        (_, Point { center }) => Some(farthest_distance(a, center)),
        (Ball { center: c1, radius: r1 }, Ball { center: c2, radius: r2 }) => {
            Some(((c1 - c2).norm() + r1 - r2).max(0.0))
        }
        (Box { center: c1, half_widths: r1 }, Box { center: c2, half_widths: r2 }) => {
            let mut acc = 0.0;
            for i in 0..c1.len() {
                let term = ((c1[i] - c2[i]).abs() + r1[i] - r2[i]).max(0.0);
                acc += term * term;
            }
            Some(acc.sqrt())
        }
        (Segment { start, end }, Segment { .. }) => {
            // d(·, B) is convex, so the supremum over a segment sits at an
            // endpoint.
            Some(b.distance(start)?.max(b.distance(end)?))
        }
        _ => None,
    };
    Ok(value)
}

/// `sup_{x∈A} |x − y|`, exact per variant.
fn farthest_distance(a: &ConvexRegion, y: &Vector) -> f64 {
    a.translate(&(-y)).farthest_norm()
}

/// Hausdorff distance: the larger of the two one-sided excesses.
pub fn hausdorff(a: &ConvexRegion, b: &ConvexRegion) -> Result<f64> {
    Ok(excess(a, b)?.max(excess(b, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(vals: &[f64]) -> Vector {
        Vector::from_vec(vals.to_vec())
    }

    #[test]
    fn support_trivia() {
        let origin = ConvexRegion::point(v(&[0.0, 0.0]));
        let e = Direction::new(v(&[0.3, -0.7])).unwrap();
        assert_eq!(origin.support(&e).unwrap(), 0.0);

        let ball = ConvexRegion::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_relative_eq!(ball.support(&e).unwrap(), 1.0, epsilon = 1e-15);
    }

    /// Brute-force support of a box by enumerating its vertices.
    fn box_support_by_vertices(center: &Vector, half: &Vector, e: &Vector) -> f64 {
        let d = center.len();
        let mut best = f64::NEG_INFINITY;
        for mask in 0..(1usize << d) {
            let mut dot = 0.0;
            for i in 0..d {
                let sign = if mask & (1 << i) != 0 { 1.0 } else { -1.0 };
                dot += e[i] * (center[i] + sign * half[i]);
            }
            best = best.max(dot);
        }
        best
    }

    #[test]
    fn box_support_example() {
        let center = v(&[1.0, 0.0]);
        let half = v(&[2.0, 3.0]);
        let region = ConvexRegion::aligned_box(center.clone(), half.clone()).unwrap();
        let e = Direction::new(v(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(region.support(&e).unwrap(), 3.0, epsilon = 1e-15);
        assert_relative_eq!(
            region.support(&e).unwrap(),
            box_support_by_vertices(&center, &half, e.unit()),
            epsilon = 1e-13
        );
    }

    #[test]
    fn projection_examples() {
        let ball = ConvexRegion::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let p = ball.project(&v(&[2.0, 0.0])).unwrap();
        assert_relative_eq!(p[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(p[1], 0.0, epsilon = 1e-14);

        let bx = ConvexRegion::aligned_box(v(&[0.0, 0.0]), v(&[1.0, 2.0])).unwrap();
        let p = bx.project(&v(&[3.0, -5.0])).unwrap();
        assert_eq!(p, v(&[1.0, -2.0]));
    }

    #[test]
    fn projection_matches_grid_search() {
        // Independent oracle: scan a dense grid of box members for the
        // minimizer of the distance to y.
        let bx = ConvexRegion::aligned_box(v(&[0.0, 0.0]), v(&[1.0, 2.0])).unwrap();
        let y = v(&[3.0, -5.0]);
        let mut best = f64::INFINITY;
        let mut arg = v(&[0.0, 0.0]);
        let steps = 200;
        for i in 0..=steps {
            for j in 0..=steps {
                let cand = v(&[
                    -1.0 + 2.0 * i as f64 / steps as f64,
                    -2.0 + 4.0 * j as f64 / steps as f64,
                ]);
                let dist = (&cand - &y).norm();
                if dist < best {
                    best = dist;
                    arg = cand;
                }
            }
        }
        let p = bx.project(&y).unwrap();
        assert!((&p - &arg).norm() < 0.03, "grid argmin {arg:?} vs projection {p:?}");
        assert!((&y - &p).norm() <= best + 1e-12);
    }

    #[test]
    fn projection_is_identity_on_members() {
        let regions = [
            ConvexRegion::ball(v(&[1.0, -1.0]), 2.0).unwrap(),
            ConvexRegion::aligned_box(v(&[0.0, 0.5]), v(&[1.0, 1.0])).unwrap(),
        ];
        let y = v(&[0.5, 0.0]);
        for r in &regions {
            assert!(r.contains(&y));
            assert_eq!(r.project(&y).unwrap(), y);
        }
    }

    #[test]
    fn distance_examples() {
        let ball = ConvexRegion::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(ball.distance(&v(&[0.5, 0.0])).unwrap(), 0.0);
        assert_relative_eq!(ball.distance(&v(&[0.0, 2.0])).unwrap(), 1.0, epsilon = 1e-14);

        let bx = ConvexRegion::aligned_box(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        assert_relative_eq!(bx.distance(&v(&[2.0, 2.0])).unwrap(), 2f64.sqrt(), epsilon = 1e-14);
        // Corner-distance oracle by grid search over the box.
        let mut best = f64::INFINITY;
        for i in 0..=100 {
            for j in 0..=100 {
                let cand = v(&[-1.0 + 0.02 * i as f64, -1.0 + 0.02 * j as f64]);
                best = best.min((&cand - &v(&[2.0, 2.0])).norm());
            }
        }
        assert!((bx.distance(&v(&[2.0, 2.0])).unwrap() - best).abs() < 1e-9);
    }

    #[test]
    fn hausdorff_examples() {
        let b1 = ConvexRegion::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(hausdorff(&b1, &b1).unwrap(), 0.0);

        let b3 = ConvexRegion::ball(v(&[0.0, 0.0]), 3.0).unwrap();
        assert_relative_eq!(hausdorff(&b1, &b3).unwrap(), 2.0, epsilon = 1e-14);

        let bx0 = ConvexRegion::aligned_box(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let bx1 = ConvexRegion::aligned_box(v(&[1.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        assert_relative_eq!(hausdorff(&bx0, &bx1).unwrap(), 1.0, epsilon = 1e-14);
        // Vertex brute force: translated congruent boxes realize d_H at a
        // vertex of either operand.
        let mut worst = 0.0f64;
        for mask in 0..4usize {
            let sx = if mask & 1 != 0 { 1.0 } else { -1.0 };
            let sy = if mask & 2 != 0 { 1.0 } else { -1.0 };
            let vertex = v(&[sx, sy]);
            worst = worst.max(bx1.distance(&vertex).unwrap());
            let vertex = v(&[1.0 + sx, sy]);
            worst = worst.max(bx0.distance(&vertex).unwrap());
        }
        assert_relative_eq!(hausdorff(&bx0, &bx1).unwrap(), worst, epsilon = 1e-12);
    }

    #[test]
    fn point_cross_variant_excess_is_exact() {
        let p = ConvexRegion::point(v(&[2.0, 0.0]));
        let ball = ConvexRegion::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_relative_eq!(excess(&p, &ball).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(excess(&ball, &p).unwrap(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn direction_net_dimension_one_is_exact() {
        let net = DirectionNet::standard(1);
        assert_eq!(net.len(), 2);
        let a = ConvexRegion::interval(-1.0, 1.0).unwrap();
        let b = ConvexRegion::interval(0.0, 3.0).unwrap();
        let exact = hausdorff(&a, &b).unwrap();
        let via_net = excess_on_net(&a, &b, &net)
            .unwrap()
            .max(excess_on_net(&b, &a, &net).unwrap());
        assert_relative_eq!(exact, via_net, epsilon = 1e-14);
    }

    #[test]
    fn direction_net_sizes() {
        assert!(DirectionNet::standard(2).len() >= 64);
        assert!(DirectionNet::standard(3).len() >= 96);
        for d in 1..=4 {
            for e in DirectionNet::standard(d).directions() {
                assert_relative_eq!(e.unit().norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn membership_matches_support_characterization() {
        let net = DirectionNet::standard(2);
        let bx = ConvexRegion::aligned_box(v(&[0.5, -0.5]), v(&[1.0, 2.0])).unwrap();
        let inside = v(&[1.0, 0.0]);
        let outside = v(&[3.0, -0.5]);
        assert_eq!(bx.distance(&inside).unwrap(), 0.0);
        for e in net.directions() {
            assert!(e.unit().dot(&inside) <= bx.support(e).unwrap() + 1e-12);
        }
        assert!(bx.distance(&outside).unwrap() > 0.0);
        let violated = net
            .directions()
            .iter()
            .any(|e| e.unit().dot(&outside) > bx.support(e).unwrap() + 1e-12);
        assert!(violated, "an outside point must violate some net direction");
    }

    fn arbitrary_box() -> impl Strategy<Value = ConvexRegion> {
        (
            proptest::collection::vec(-3.0f64..3.0, 2),
            proptest::collection::vec(0.0f64..2.0, 2),
        )
            .prop_map(|(c, r)| {
                ConvexRegion::aligned_box(Vector::from_vec(c), Vector::from_vec(r)).unwrap()
            })
    }

    fn arbitrary_ball() -> impl Strategy<Value = ConvexRegion> {
        (proptest::collection::vec(-3.0f64..3.0, 2), 0.0f64..2.0)
            .prop_map(|(c, r)| ConvexRegion::ball(Vector::from_vec(c), r).unwrap())
    }

    proptest! {
        #[test]
        fn projection_idempotent(
            region in prop_oneof![arbitrary_box(), arbitrary_ball()],
            y in proptest::collection::vec(-6.0f64..6.0, 2),
        ) {
            let y = Vector::from_vec(y);
            let p1 = region.project(&y).unwrap();
            let p2 = region.project(&p1).unwrap();
            prop_assert!((p1 - p2).norm() <= 1e-12);
        }

        #[test]
        fn hausdorff_is_a_metric_on_boxes(
            a in arbitrary_box(),
            b in arbitrary_box(),
            c in arbitrary_box(),
        ) {
            let dab = hausdorff(&a, &b).unwrap();
            let dba = hausdorff(&b, &a).unwrap();
            prop_assert_eq!(dab, dba);
            let dac = hausdorff(&a, &c).unwrap();
            let dcb = hausdorff(&c, &b).unwrap();
            prop_assert!(dab <= dac + dcb + 1e-9);
        }

        #[test]
        fn hausdorff_is_a_metric_on_balls(
            a in arbitrary_ball(),
            b in arbitrary_ball(),
            c in arbitrary_ball(),
        ) {
            let dab = hausdorff(&a, &b).unwrap();
            prop_assert_eq!(dab, hausdorff(&b, &a).unwrap());
            prop_assert!(dab <= hausdorff(&a, &c).unwrap() + hausdorff(&c, &b).unwrap() + 1e-9);
        }

        #[test]
        fn same_variant_hausdorff_close_to_net_supremum(
            a in arbitrary_box(),
            b in arbitrary_box(),
        ) {
            // Net maxima are lower bounds; the gap is controlled by the
            // angular resolution times the farthest-point norms.
            let net = DirectionNet::standard(2);
            let exact = hausdorff(&a, &b).unwrap();
            let mut net_sup = 0.0f64;
            for e in net.directions() {
                net_sup = net_sup.max((a.support(e).unwrap() - b.support(e).unwrap()).abs());
            }
            let tol = (a.farthest_norm() + b.farthest_norm())
                * std::f64::consts::PI / net.len() as f64 + 1e-12;
            prop_assert!(net_sup <= exact + 1e-12);
            prop_assert!(exact <= net_sup + tol);
        }

        #[test]
        fn support_point_attains_support(
            region in prop_oneof![arbitrary_box(), arbitrary_ball()],
            e in proptest::collection::vec(-1.0f64..1.0, 2),
        ) {
            let e = Vector::from_vec(e);
            prop_assume!(e.norm() > 1e-3);
            let dir = Direction::new(e.clone()).unwrap();
            let point = region.support_point(dir.unit()).unwrap();
            let sup = region.support(&dir).unwrap();
            prop_assert!((dir.unit().dot(&point) - sup).abs() <= 1e-11);
            prop_assert!(region.distance(&point).unwrap() <= 1e-12);
        }
    }
}
