//! Convergence order of the single-valued solver on x = 1 + ∫₀ᵗ x ds,
//! whose solution is eᵗ. Midpoint collocation is second order: the sup
//! error shrinks by ~4 per grid doubling.
//!
//! Run with: cargo run --example closed_form_benchmark

use volterra_inclusion::presets;
use volterra_inclusion::solvers::single_valued_solve;

fn main() {
    println!("{:>6}  {:>12}  {:>6}", "N", "sup error", "ratio");
    let mut previous: Option<f64> = None;
    for n in [32usize, 64, 128, 256, 512] {
        let inst = presets::exponential_growth(n).unwrap();
        let (x, _) = single_valued_solve(&inst, 1e-12).unwrap();
        let mut worst = 0.0f64;
        for i in 0..=n {
            let t = inst.grid().node(i);
            worst = worst.max((x.value(i)[0] - t.exp()).abs());
        }
        match previous {
            Some(prev) => println!("{n:>6}  {worst:>12.3e}  {:>6.2}", prev / worst),
            None => println!("{n:>6}  {worst:>12.3e}  {:>6}", "-"),
        }
        previous = Some(worst);
    }
}
