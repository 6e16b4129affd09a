//! Numeric lint of the problem hypotheses: Lipschitz modulus, origin and
//! growth bounds for the field; slice continuity, invertible diagonal and
//! the time-derivative bound for the kernel. One certified instance and one
//! deliberately understated claim.
//!
//! Run with: cargo run --example hypothesis_lint

use volterra_inclusion::fields::{Coeff, SamplerConfig};
use volterra_inclusion::presets;
use volterra_inclusion::timebase::{Grid, ScalarTable, Trajectory};
use volterra_inclusion::{
    FieldData, KernelOperator, Matrix, ProblemInstance, SetField, Vector,
};

fn main() {
    // a certified instance: derived data tables pass by construction
    let good = presets::planar_ball_drift(64).unwrap();
    println!("planar drift instance:");
    print_verdicts(&good);

    // claimed α ≡ 0 for a field that moves one-for-one with the state
    let grid = Grid::new(1.0, 16).unwrap();
    let bad = ProblemInstance::builder(
        KernelOperator::scalar_constant(1.0),
        SetField::affine_ball(
            Coeff::Constant(Matrix::identity(1, 1)),
            Coeff::Constant(Vector::zeros(1)),
            Coeff::Constant(1.0),
        )
        .unwrap(),
        Trajectory::zeros(grid, 1),
        1.0,
    )
    .field_data(
        FieldData::new(
            ScalarTable::constant(grid, 0.0),
            ScalarTable::constant(grid, 1.0),
            ScalarTable::constant(grid, 2.0),
        )
        .unwrap(),
    )
    .lint_sampler(SamplerConfig { seed: 3, ..SamplerConfig::default() })
    .build()
    .unwrap();
    println!("\nunderstated Lipschitz claim:");
    print_verdicts(&bad);
    if let Some(witness) = &bad.field_lint().lipschitz.witness {
        println!(
            "  witness: t = {}, |x − y| gap measured {:.4} vs claimed bound {:.4}",
            witness.t, witness.measured, witness.bound
        );
    }
}

fn print_verdicts(inst: &ProblemInstance) {
    let k = inst.kernel_lint();
    let f = inst.field_lint();
    println!("  kernel: slice continuity {} [{}] | diagonal invertible {} | derivative bound {} | q-norm continuity {} [{}]",
        k.slice_continuity.passed, k.slice_continuity.label,
        k.diagonal_invertible.passed,
        k.derivative_bound.passed,
        k.qnorm_continuity.passed, k.qnorm_continuity.label);
    println!(
        "  field:  lipschitz {} | origin bound {} | growth bound {}",
        f.lipschitz.passed, f.origin_bound.passed, f.growth_bound.passed
    );
}
