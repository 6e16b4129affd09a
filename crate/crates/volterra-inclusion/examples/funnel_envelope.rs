//! Sample the solution funnel of the reference interval inclusion with
//! bang-bang seeds, compare the cross-sections against the closed-form
//! envelope ±(eᵗ − 1), and report terminal attainment.
//!
//! Run with: cargo run --example funnel_envelope

use volterra_inclusion::funnel::{sample_funnel, scalar_envelope_oracle};
use volterra_inclusion::presets;

fn main() {
    let inst = presets::reference_interval(1.0, 256).unwrap();
    let sample = sample_funnel(&inst, 32, 2026, 1e-10, 1).unwrap();
    let (x_min, x_max) = scalar_envelope_oracle(&inst, 1e-10).unwrap();
    let grid = inst.grid();
    let n = grid.subintervals();

    println!(
        "{} of 32 seeds converged, {} failures",
        sample.entries.len(),
        sample.failures.len()
    );
    println!(
        "{:>6}  {:>10}  {:>10}  {:>10}  {:>10}",
        "t", "sample min", "sample max", "envelope−", "envelope+"
    );
    for i in (0..=n).step_by(32) {
        let section = &sample.cross_sections[i];
        println!(
            "{:>6.3}  {:>10.5}  {:>10.5}  {:>10.5}  {:>10.5}",
            grid.node(i),
            section.min[0],
            section.max[0],
            x_min.value(i)[0],
            x_max.value(i)[0]
        );
    }
    let width = x_max.value(n)[0] - x_min.value(n)[0];
    let sampled = sample.cross_sections[n].max[0] - sample.cross_sections[n].min[0];
    println!("terminal attainment: {:.2}% of the envelope width", 100.0 * sampled / width);
}
