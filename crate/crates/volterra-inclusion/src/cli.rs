//! Batch front end: problem files in, CSV tables and JSON reports out.
//!
//! Five commands mirror the solver surface: `check` (hypothesis lint),
//! `solve` (fixed point), `select` (successive-approximation scheme with
//! ledger), `funnel` (solution-set sampling with envelope columns for
//! eligible scalar problems) and `periodic` (return-map orbit search).
//!
//! Conventions shared by all outputs:
//! - every CSV starts with a version marker line and a header row; numbers
//!   are decimal with 17 significant digits, LF line endings;
//! - trajectory rows run over the `N+1` nodes; selection columns repeat the
//!   final subinterval's value on the last row, and the residual column is 0
//!   there (no subinterval starts at the horizon);
//! - exit status 0 means success, 1 a domain failure (lint or ledger
//!   violation, non-convergence), 2 a parse or usage error. Domain failures
//!   still write whatever partial outputs exist, plus the report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::funnel::{sample_funnel, scalar_envelope_oracle, FunnelSample};
use crate::problem::{load_problem, Measured, RunReport, CSV_HEADER_VERSION};
use crate::solvers::{periodic_solve, picard_solve, selection_scheme_solve};
use crate::timebase::{ScalarTable, Selection, Trajectory};
use crate::{Error, Result, Vector};

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "VINC_OUT_DIR";

/// Output directory resolution: explicit flag, then `VINC_OUT_DIR`, then the
/// working directory.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Decimal with 17 significant digits, the fixed CSV number format.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".into())
}

fn write_output(out_dir: &Path, name: &str, content: &str, report: &mut RunReport) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    std::fs::write(&path, content)?;
    report.outputs.push(path.display().to_string());
    Ok(())
}

fn write_report(out_dir: &Path, stem: &str, report: &RunReport) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(format!("{stem}_{}_report.json", report.command));
    std::fs::write(&path, report.to_json())?;
    Ok(path)
}

/// Run a domain step: parse/io errors propagate, anything else is recorded
/// as a failure in the report.
fn domain<T>(report: &mut RunReport, result: Result<T>) -> Result<Option<T>> {
    match result {
        Ok(value) => Ok(Some(value)),
        Err(e @ (Error::ProblemFile(_) | Error::Io(_))) => Err(e),
        Err(e) => {
            report.notes.push(format!("domain failure: {e}"));
            report.success = false;
            Ok(None)
        }
    }
}

fn solution_csv(
    x: &Trajectory,
    u: &Selection,
    residual: &ScalarTable,
) -> String {
    let grid = x.grid();
    let dim = x.dim();
    let mut out = String::new();
    let _ = writeln!(out, "# volterra-inclusion {CSV_HEADER_VERSION}");
    let mut header = String::from("t");
    for c in 1..=dim {
        let _ = write!(header, ",x{c}");
    }
    for c in 1..=dim {
        let _ = write!(header, ",u{c}");
    }
    header.push_str(",residual");
    let _ = writeln!(out, "{header}");
    let n = grid.subintervals();
    for i in 0..=n {
        let mut row = fmt(grid.node(i));
        for c in 0..dim {
            let _ = write!(row, ",{}", fmt(x.value(i)[c]));
        }
        let j = i.min(n - 1);
        for c in 0..dim {
            let _ = write!(row, ",{}", fmt(u.value(j)[c]));
        }
        let _ = write!(row, ",{}", fmt(residual.value(i)));
        let _ = writeln!(out, "{row}");
    }
    out
}

fn trajectory_csv(x: &Trajectory) -> String {
    let grid = x.grid();
    let dim = x.dim();
    let mut out = String::new();
    let _ = writeln!(out, "# volterra-inclusion {CSV_HEADER_VERSION}");
    let mut header = String::from("t");
    for c in 1..=dim {
        let _ = write!(header, ",x{c}");
    }
    let _ = writeln!(out, "{header}");
    for i in 0..=grid.subintervals() {
        let mut row = fmt(grid.node(i));
        for c in 0..dim {
            let _ = write!(row, ",{}", fmt(x.value(i)[c]));
        }
        let _ = writeln!(out, "{row}");
    }
    out
}

/// Hypothesis lint of kernel and field; exit 0 iff every check passes.
pub fn cmd_check(problem: &Path, out_dir: &Path) -> Result<RunReport> {
    let mut report = RunReport::new("check", problem);
    let loaded = load_problem(problem)?;
    let inst = &loaded.instance;

    let kernel = inst.kernel_lint();
    report.verdict("kernel_slice_continuity", kernel.slice_continuity.passed);
    report.verdict("kernel_diagonal_invertible", kernel.diagonal_invertible.passed);
    report.verdict("kernel_derivative_bound", kernel.derivative_bound.passed);
    report.verdict("kernel_qnorm_continuity", kernel.qnorm_continuity.passed);
    let field = inst.field_lint();
    report.verdict("field_lipschitz", field.lipschitz.passed);
    report.verdict("field_origin_bound", field.origin_bound.passed);
    report.verdict("field_growth_bound", field.growth_bound.passed);

    report.measurements.push(Measured::new(
        "sup_slice_qnorm",
        kernel.sup_slice_qnorm,
        0.0,
        "sampled over grid nodes; sample-consistent, not certified",
    ));
    report.measurements.push(Measured::new(
        "weight_constant",
        inst.weight_constant(),
        0.0,
        "max{1, sup_t ‖k(t,·)‖_q^p}, drives the adapted norm",
    ));
    report.detail = json!({ "kernel": kernel, "field": field });
    let _ = write_report(out_dir, &file_stem(problem), &report)?;
    Ok(report)
}

/// Options of the `solve` command.
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Constant starting selection (defaults to zero).
    pub seed_value: Option<Vec<f64>>,
    /// Weighted-increment tolerance (defaults to the problem file's).
    pub tol: Option<f64>,
    pub max_iterations: Option<usize>,
}

/// Fixed-point solve; writes the trajectory/selection/residual table even on
/// non-convergence (exit 1 with partial outputs).
pub fn cmd_solve(problem: &Path, out_dir: &Path, options: &SolveOptions) -> Result<RunReport> {
    let mut report = RunReport::new("solve", problem);
    let loaded = load_problem(problem)?;
    let inst = &loaded.instance;
    let stem = file_stem(problem);

    let u0 = match &options.seed_value {
        Some(values) => {
            if values.len() != inst.dim() {
                return Err(Error::ProblemFile(format!(
                    "--seed-selection needs {} components",
                    inst.dim()
                )));
            }
            Selection::constant(inst.grid(), Vector::from_vec(values.clone()))
        }
        None => Selection::zeros(inst.grid(), inst.dim()),
    };
    let tol = options.tol.unwrap_or(loaded.tolerances.weighted_increment);
    let max_iterations = options.max_iterations.unwrap_or(loaded.tolerances.max_iterations);

    let Some((u, x, solve)) = domain(&mut report, picard_solve(inst, &u0, tol, max_iterations))?
    else {
        let _ = write_report(out_dir, &stem, &report)?;
        return Ok(report);
    };
    let (pointwise, aggregate) = inst.nemytskii_residual(&x, &u)?;
    write_output(out_dir, &format!("{stem}_solution.csv"), &solution_csv(&x, &u, &pointwise), &mut report)?;

    report.verdict("converged", solve.converged);
    report.measurements.push(Measured::new(
        "final_weighted_increment",
        solve.increments.last().copied().unwrap_or(0.0),
        tol,
        "weighted-norm distance of the last two iterates",
    ));
    report.measurements.push(Measured::new(
        "membership_residual",
        aggregate,
        0.0,
        "L^p aggregate of pointwise distances to the field values; 0 = grid-exact",
    ));
    report.detail = json!({ "solve": solve });
    let _ = write_report(out_dir, &stem, &report)?;
    Ok(report)
}

/// Successive-approximation scheme with its bound ledger; a ledger violation
/// exits 1 with the witness row in the report.
pub fn cmd_select(problem: &Path, out_dir: &Path, epsilon: f64, nmax: usize) -> Result<RunReport> {
    let mut report = RunReport::new("select", problem);
    let loaded = load_problem(problem)?;
    let inst = &loaded.instance;
    let stem = file_stem(problem);

    let outcome = domain(
        &mut report,
        selection_scheme_solve(inst, epsilon, nmax, loaded.tolerances.sup_increment),
    )?;
    let Some((x, f, ledger)) = outcome else {
        let _ = write_report(out_dir, &stem, &report)?;
        return Ok(report);
    };
    let (pointwise, aggregate) = inst.nemytskii_residual(&x, &f)?;
    write_output(
        out_dir,
        &format!("{stem}_selection_solution.csv"),
        &solution_csv(&x, &f, &pointwise),
        &mut report,
    )?;

    // ledger table: one row per (β index, subinterval midpoint)
    let grid = inst.grid();
    let mut csv = String::new();
    let _ = writeln!(csv, "# volterra-inclusion {CSV_HEADER_VERSION}");
    let _ = writeln!(csv, "n,t,beta_n,bound_margin,increment_bound");
    for check in &ledger.iteration_checks {
        let beta = &ledger.beta[check.n];
        for j in 0..grid.subintervals() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                check.n + 1,
                fmt(grid.midpoint(j)),
                fmt(beta.at_midpoint(j)),
                fmt(check.pointwise_margins[j]),
                fmt(check.increment_bound),
            );
        }
    }
    write_output(out_dir, &format!("{stem}_selection_ledger.csv"), &csv, &mut report)?;

    let all_checks = ledger.iteration_checks.iter().all(|c| c.passed);
    let recursion_ok = ledger
        .recursion_margins
        .iter()
        .all(|margins| margins.iter().all(|&m| m >= 0.0));
    report.verdict("iteration_bounds", all_checks);
    report.verdict("beta_recursion", recursion_ok);
    report.notes.extend(ledger.warnings.iter().cloned());
    report.measurements.push(Measured::new(
        "membership_residual",
        aggregate,
        0.0,
        "0 = grid-exact member of the superposition set",
    ));
    report.measurements.push(Measured::new(
        "worst_pointwise_margin",
        ledger
            .iteration_checks
            .iter()
            .map(|c| c.pointwise_margin)
            .fold(f64::INFINITY, f64::min),
        0.0,
        "min over iterations and subintervals of α·β^{1/p} − |Δf|; must be ≥ 0",
    ));
    report.detail = json!({ "ledger": ledger });
    let _ = write_report(out_dir, &stem, &report)?;
    Ok(report)
}

fn funnel_csv(
    sample: &FunnelSample,
    envelope: Option<&(Trajectory, Trajectory)>,
    grid: crate::Grid,
    dim: usize,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# volterra-inclusion {CSV_HEADER_VERSION}");
    let mut header = String::from("t");
    for c in 1..=dim {
        let _ = write!(header, ",min{c},max{c},centroid{c}");
    }
    if envelope.is_some() {
        header.push_str(",envelope_min,envelope_max");
    }
    let _ = writeln!(out, "{header}");
    for i in 0..=grid.subintervals() {
        let section = &sample.cross_sections[i];
        let mut row = fmt(grid.node(i));
        for c in 0..dim {
            let _ = write!(
                row,
                ",{},{},{}",
                fmt(section.min[c]),
                fmt(section.max[c]),
                fmt(section.centroid[c])
            );
        }
        if let Some((lo, hi)) = envelope {
            let _ = write!(row, ",{},{}", fmt(lo.value(i)[0]), fmt(hi.value(i)[0]));
        }
        let _ = writeln!(out, "{row}");
    }
    out
}

/// Solution-set sampling; envelope columns appear when the scalar oracle's
/// preconditions hold.
pub fn cmd_funnel(
    problem: &Path,
    out_dir: &Path,
    count: usize,
    rng_seed: Option<u64>,
    jobs: usize,
) -> Result<RunReport> {
    let mut report = RunReport::new("funnel", problem);
    let loaded = load_problem(problem)?;
    let inst = &loaded.instance;
    let stem = file_stem(problem);
    let seed = rng_seed.unwrap_or(loaded.rng_seed);
    let tol = loaded.tolerances.weighted_increment;

    let Some(sample) = domain(&mut report, sample_funnel(inst, count, seed, tol, jobs.max(1)))?
    else {
        let _ = write_report(out_dir, &stem, &report)?;
        return Ok(report);
    };

    let envelope = match scalar_envelope_oracle(inst, tol) {
        Ok(pair) => Some(pair),
        Err(Error::EnvelopeOracle(reason)) => {
            report.notes.push(format!("envelope oracle skipped: {reason}"));
            None
        }
        Err(other) => return Err(other),
    };

    write_output(
        out_dir,
        &format!("{stem}_funnel_sections.csv"),
        &funnel_csv(&sample, envelope.as_ref(), inst.grid(), inst.dim()),
        &mut report,
    )?;

    if !sample.failures.is_empty() {
        report
            .notes
            .push(format!("seeds without convergence: {:?}", sample.failures));
    }
    if let Some((lo, hi)) = &envelope {
        let n = inst.grid().subintervals();
        let contained = sample.entries.iter().all(|entry| {
            (0..=n).all(|i| {
                let v = entry.trajectory.value(i)[0];
                v >= lo.value(i)[0] - 1e-9 && v <= hi.value(i)[0] + 1e-9
            })
        });
        report.verdict("envelope_containment", contained);
        let width = hi.value(n)[0] - lo.value(n)[0];
        let sampled = sample.cross_sections[n].max[0] - sample.cross_sections[n].min[0];
        let attainment = if width > 0.0 { sampled / width } else { 1.0 };
        report.measurements.push(Measured::new(
            "terminal_attainment",
            attainment,
            0.95,
            "sampled terminal cross-section width / envelope width",
        ));
    }
    report.measurements.push(Measured::new(
        "converged_seeds",
        sample.entries.len() as f64,
        count as f64,
        "number of seeds that produced grid-exact solutions",
    ));
    report.detail = json!({
        "failures": sample.failures,
        "seed": seed,
        "count": count,
    });
    let _ = write_report(out_dir, &stem, &report)?;
    Ok(report)
}

/// Periodic-orbit search for semigroup-kernel problems; a violated smallness
/// condition exits 1.
pub fn cmd_periodic(
    problem: &Path,
    out_dir: &Path,
    tol: Option<f64>,
    max_outer: usize,
) -> Result<RunReport> {
    let mut report = RunReport::new("periodic", problem);
    let loaded = load_problem(problem)?;
    let inst = &loaded.instance;
    let stem = file_stem(problem);
    let tol = tol.unwrap_or(loaded.tolerances.sup_increment);

    let Some((x0, trajectory, periodic)) =
        domain(&mut report, periodic_solve(inst, tol, max_outer))?
    else {
        let _ = write_report(out_dir, &stem, &report)?;
        return Ok(report);
    };
    write_output(
        out_dir,
        &format!("{stem}_periodic_trajectory.csv"),
        &trajectory_csv(&trajectory),
        &mut report,
    )?;

    report.verdict("converged", periodic.converged);
    report.verdict("phi_within_radius", periodic.phi_bound_ok);
    report.measurements.push(Measured::new(
        "periodicity_defect",
        periodic.periodicity_defect,
        10.0 * tol,
        "|x(T) − x(0)| of the returned trajectory",
    ));
    report.measurements.push(Measured::new(
        "terminal_semigroup_norm",
        periodic.terminal_semigroup_norm,
        0.5,
        "‖U(T)‖; the return map needs ≤ 1/2",
    ));
    report.measurements.push(Measured::new(
        "radius_bound",
        periodic.radius_bound,
        0.0,
        "R = ‖k(T,·)‖_q·‖μ‖_p; |V(w)(T)| stays within R",
    ));
    let _ = x0;
    report.detail = json!({ "periodic": periodic });
    let _ = write_report(out_dir, &stem, &report)?;
    Ok(report)
}
