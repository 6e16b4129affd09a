//! Solve the reference interval inclusion x(t) ∈ ∫₀ᵗ [x−1, x+1] ds by the
//! contractive projection iteration, from several starting selections.
//!
//! Run with: cargo run --example picard_fixed_point

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use volterra_inclusion::presets;
use volterra_inclusion::solvers::picard_solve;
use volterra_inclusion::timebase::Selection;
use volterra_inclusion::Vector;

fn main() {
    let inst = presets::reference_interval(1.0, 256).unwrap();
    let grid = inst.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    for seed_id in 0..4 {
        let u0 = Selection::new(
            grid,
            (0..grid.subintervals())
                .map(|_| Vector::from_vec(vec![rng.random_range(-4.0..4.0)]))
                .collect(),
        )
        .unwrap();
        let (u, x, report) = picard_solve(&inst, &u0, 1e-8, 200).unwrap();
        let (_, residual) = inst.nemytskii_residual(&x, &u).unwrap();
        println!(
            "seed {seed_id}: {} iterations, converged = {}, exact fixed point = {}",
            report.iterations, report.converged, report.exact_fixed_point
        );
        println!(
            "  increments: first {:.3e}, last {:.3e}; worst ratio from iteration 2: {:.3}",
            report.increments.first().unwrap(),
            report.increments.last().unwrap(),
            report.ratios.iter().cloned().fold(0.0, f64::max),
        );
        println!(
            "  membership residual {residual:.1e}, terminal value x(T) = {:.6}",
            x.value(grid.subintervals())[0]
        );
    }
}
