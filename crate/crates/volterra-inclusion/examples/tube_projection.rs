//! Step-multifunction approximation of the metric projection onto a moving
//! tube X(t) = [t, t+1]: on dyadic windows the projection is replaced by the
//! interval hull of the per-node projections. Hulls are nested across levels
//! and their Hausdorff gap to the pointwise projection halves per level.
//!
//! Run with: cargo run --example tube_projection

use volterra_inclusion::convex::{hausdorff, ConvexRegion};
use volterra_inclusion::funnel::{step_multifunction, tube_project, Tube};
use volterra_inclusion::timebase::Grid;
use volterra_inclusion::Vector;

fn main() {
    let grid = Grid::new(1.0, 64).unwrap();
    let tube = Tube::from_scalar_intervals(grid, |t| (t, t + 1.0)).unwrap();
    let x = Vector::from_vec(vec![0.0]);

    let at = 0.71875; // between nodes: the slice interpolates
    let projected = tube_project(&x, &tube, at).unwrap();
    println!("pointwise projection of 0 onto X({at}) = {:.5}", projected[0]);

    println!("{:>5}  {:>10}  {:>12}", "level", "windows", "sup gap");
    for level in 1..=6u32 {
        let steps = step_multifunction(&tube, &x, level).unwrap();
        let mut sup_gap = 0.0f64;
        for (i, region) in steps.iter().enumerate() {
            let exact = ConvexRegion::point(Vector::from_vec(vec![grid.node(i)]));
            sup_gap = sup_gap.max(hausdorff(region, &exact).unwrap());
        }
        println!("{:>5}  {:>10}  {:>12.6}", level, 1 << level, sup_gap);
    }
    println!("(the gap equals the window width T/2^level for this tube)");
}
