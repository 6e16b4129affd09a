//! Locate a periodic trajectory of x(t) ∈ U(t)x₀ + ∫₀ᵗ U(t−s) F ds with the
//! dissipative semigroup U(t) = e^{−t} and the constant source F ≡ {1}: the
//! return map x₀ ↦ U(T)x₀ + V(w*)(T) contracts to x₀ = 1.
//!
//! Run with: cargo run --example periodic_orbit

use volterra_inclusion::presets;
use volterra_inclusion::solvers::periodic_solve;

fn main() {
    let inst = presets::decaying_point_source(1.0, 256).unwrap();
    let (x0, trajectory, report) = periodic_solve(&inst, 1e-8, 64).unwrap();

    println!("terminal semigroup norm ‖U(T)‖ = {:.6} (needs ≤ 0.5)", report.terminal_semigroup_norm);
    println!("radius bound R = {:.6}", report.radius_bound);
    println!("outer iterations: {}", report.outer_iterations);
    for (k, (inc, phi)) in report
        .outer_increments
        .iter()
        .zip(&report.phi_norms)
        .enumerate()
        .take(8)
    {
        println!("  k = {k}: |x_{{k+1}} − x_k| = {inc:.3e}, |φ(x_k)| = {phi:.6}");
    }
    println!("fixed point x₀ = {:.8}", x0[0]);
    println!("periodicity defect |x(T) − x(0)| = {:.3e}", report.periodicity_defect);
    let n = trajectory.grid().subintervals();
    println!(
        "trajectory: x(0) = {:.6}, x(T/2) = {:.6}, x(T) = {:.6}",
        trajectory.value(0)[0],
        trajectory.value(n / 2)[0],
        trajectory.value(n)[0]
    );
}
