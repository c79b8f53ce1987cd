//! Experiment runner for cosine-atom elliptic solves.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | any other error (I/O, invalid arguments, oracle failure) |
//! | 2 | problem-file parse error |
//! | 3 | ellipticity probe rejected the problem or its bounds |
//! | 4 | ledger violation |
//! | 5 | `validate` found failing checks |
//!
//! On any non-zero exit a `FAILED` file holding the error message is left in
//! the output directory.

pub mod commands;
pub mod problem_file;
pub mod scaling;
pub mod validate;

use std::path::PathBuf;

use barron_core::Error;
use clap::{Parser, Subcommand};

pub use commands::{
    run_rate_study, run_scaling_report, run_solve, run_validate, RateOptions, SolveOptions,
};
pub use problem_file::{ProblemFile, Target};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "BARRON_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "barron",
    version,
    about = "Cosine-atom solver for −∇·(A∇u) + cu = f"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the planned iteration on a problem file.
    Solve {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the file's epsilon.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        no_prune: bool,
        /// Galerkin truncation for the reference solution.
        #[arg(long = "oracle-K")]
        oracle_k: Option<usize>,
        /// Accepted for symmetry with the other commands; solves are seed-free.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte Carlo network widths against the exact H¹ error.
    RateStudy {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "16,32,64,128,256,512,1024,2048,4096"
        )]
        widths: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance for `target solve`.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Tracked norm and `Y_T` across dimensions for a template family.
    ScalingReport {
        #[arg(long, default_value = "diag-cos")]
        template: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 1e-2)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full invariant suite.
    Validate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    pub fn out_dir(&self) -> &PathBuf {
        match self {
            Command::Solve { out, .. }
            | Command::RateStudy { out, .. }
            | Command::ScalingReport { out, .. }
            | Command::Validate { out, .. } => out,
        }
    }
}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<commands::ValidationFailed>().is_some() {
        return 5;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Parse { .. }) => 2,
        Some(Error::NotElliptic(_)) | Some(Error::ProbeFailure(_)) => 3,
        Some(Error::LedgerViolation { .. }) => 4,
        _ => 1,
    }
}

fn dispatch(cmd: &Command) -> anyhow::Result<()> {
    match cmd {
        Command::Solve {
            file,
            out,
            epsilon,
            no_prune,
            oracle_k,
            seed: _,
        } => run_solve(
            file,
            out,
            &SolveOptions {
                epsilon: *epsilon,
                no_prune: *no_prune,
                oracle_k: *oracle_k,
            },
        ),
        Command::RateStudy {
            file,
            out,
            widths,
            trials,
            seed,
            epsilon,
        } => run_rate_study(
            file,
            out,
            &RateOptions {
                widths: widths.clone(),
                trials: *trials,
                seed: *seed,
                epsilon: *epsilon,
            },
        ),
        Command::ScalingReport {
            template,
            dims,
            epsilon,
            out,
        } => run_scaling_report(template, dims, *epsilon, out),
        Command::Validate { out, seed } => {
            let checks = commands::validate_checks(out, *seed)?;
            for c in &checks {
                println!(
                    "[{}] criterion {} {} value={:e} tol={:e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.criterion,
                    c.name,
                    c.value,
                    c.tolerance
                );
            }
            commands::ensure_all_passed(&checks)
        }
    }
}

/// Runs one command and returns its exit code, leaving a `FAILED` marker
/// in the output directory on error.
pub fn execute(cmd: &Command) -> i32 {
    let out = cmd.out_dir();
    let marker = out.join("FAILED");
    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("error: cannot create {}: {e}", out.display());
        return 1;
    }
    let _ = std::fs::remove_file(&marker);
    match dispatch(cmd) {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e:#}");
            let _ = std::fs::write(&marker, format!("exit {code}\n{e:#}\n"));
            code
        }
    }
}
