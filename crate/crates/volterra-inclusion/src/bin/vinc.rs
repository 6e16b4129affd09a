use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use volterra_inclusion::cli::{
    cmd_check, cmd_funnel, cmd_periodic, cmd_select, cmd_solve, resolve_out_dir, SolveOptions,
};
use volterra_inclusion::Error;

/// Batch solver for set-valued Volterra integral equations.
#[derive(Parser)]
#[command(name = "vinc", version, about)]
struct Cli {
    /// Output directory for CSV tables and reports (default: $VINC_OUT_DIR or `.`)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lint the kernel and field hypotheses of a problem file
    Check { problem: PathBuf },
    /// Solve the inclusion by the contractive projection iteration
    Solve {
        problem: PathBuf,
        /// Constant starting selection, comma-separated components
        #[arg(long = "seed-selection", value_delimiter = ',')]
        seed_selection: Option<Vec<f64>>,
        /// Weighted-increment stopping tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Iteration cap
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
    },
    /// Run the successive-approximation scheme and emit its bound ledger
    Select {
        problem: PathBuf,
        /// Slack parameter of the scheme
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Number of approximation stages
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// Sample the solution set from bang-bang seeds
    Funnel {
        problem: PathBuf,
        /// Number of seeds
        #[arg(long = "K", default_value_t = 32)]
        count: usize,
        /// Override the problem file's RNG seed
        #[arg(long = "rng-seed")]
        rng_seed: Option<u64>,
        /// Seed-parallel solves (deterministic merge by seed id)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Search for a periodic trajectory of a semigroup-kernel problem
    Periodic {
        problem: PathBuf,
        /// Outer fixed-point tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Outer iteration cap
        #[arg(long = "max-outer", default_value_t = 64)]
        max_outer: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = resolve_out_dir(cli.out_dir.clone());
    let result = match &cli.command {
        Command::Check { problem } => cmd_check(problem, &out_dir),
        Command::Solve { problem, seed_selection, tol, max_iter } => cmd_solve(
            problem,
            &out_dir,
            &SolveOptions {
                seed_value: seed_selection.clone(),
                tol: *tol,
                max_iterations: *max_iter,
            },
        ),
        Command::Select { problem, epsilon, nmax } => {
            cmd_select(problem, &out_dir, *epsilon, *nmax)
        }
        Command::Funnel { problem, count, rng_seed, jobs } => {
            cmd_funnel(problem, &out_dir, *count, *rng_seed, *jobs)
        }
        Command::Periodic { problem, tol, max_outer } => {
            cmd_periodic(problem, &out_dir, *tol, *max_outer)
        }
    };
    match result {
        Ok(report) => {
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            for output in &report.outputs {
                println!("wrote {output}");
            }
            println!(
                "{}: {}",
                report.command,
                if report.success { "ok" } else { "FAILED" }
            );
            if report.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ (Error::ProblemFile(_) | Error::Io(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
