//! Measure the contraction ratio of the selection-set map
//! G(h, u) = N(h + V(u)) in its adapted weighted norm: over random pairs
//! the Hausdorff distance divided by |||u₁ − u₂|||_p must stay below
//! 2^{−1/p}.
//!
//! Run with: cargo run --example contraction_probe

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use volterra_inclusion::presets;
use volterra_inclusion::timebase::Selection;
use volterra_inclusion::Vector;

fn main() {
    for p in [1.0, 2.0] {
        let inst = presets::reference_interval(p, 256).unwrap();
        let grid = inst.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(2026);
        let mut worst = 0.0f64;
        let mut sum = 0.0;
        let pairs = 100;
        for _ in 0..pairs {
            let draw = |rng: &mut ChaCha8Rng| {
                Selection::new(
                    grid,
                    (0..grid.subintervals())
                        .map(|_| Vector::from_vec(vec![rng.random_range(-2.0..2.0)]))
                        .collect(),
                )
                .unwrap()
            };
            let u1 = draw(&mut rng);
            let u2 = draw(&mut rng);
            let ratio = inst.contraction_ratio_probe(&u1, &u2).unwrap();
            worst = worst.max(ratio);
            sum += ratio;
        }
        println!(
            "p = {p}: {pairs} pairs, mean ratio {:.4}, worst {:.4}, bound 2^(-1/p) = {:.4}",
            sum / pairs as f64,
            worst,
            (2.0f64).powf(-1.0 / p)
        );
    }
}
