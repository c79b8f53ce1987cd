//! The four subcommands. Each writes its artifacts into an output directory.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use barron_core::{
    galerkin_solve, h1_distance, main_theorem_predictor, plan, rate_study, solve, Error,
    SolveConfig,
};

use crate::problem_file::{ProblemFile, Target};
use crate::scaling::{fit_report, rows_csv, scaling_rows, timing_csv};
use crate::validate::{checks_csv, reference_truncation, run_suite, Check};

/// Largest dimension that gets a Galerkin comparison.
pub const ORACLE_MAX_DIM: usize = 3;

#[derive(Debug, thiserror::Error)]
#[error("{failed} validation check(s) failed")]
pub struct ValidationFailed {
    pub failed: usize,
}

fn write(out: &Path, name: &str, contents: &str) -> Result<()> {
    let path = out.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn missing_epsilon() -> Error {
    Error::Parse {
        line: 0,
        detail: "no epsilon in the problem file and no --epsilon flag".into(),
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub epsilon: Option<f64>,
    pub no_prune: bool,
    pub oracle_k: Option<usize>,
}

pub fn run_solve(file: &Path, out: &Path, opts: &SolveOptions) -> Result<()> {
    let pf = ProblemFile::read(file)?;
    let p = &pf.problem;
    let eps = opts.epsilon.or(pf.epsilon).ok_or_else(missing_epsilon)?;
    let cfg = SolveConfig {
        prune: !opts.no_prune,
        prune_budget: pf.prune_budget,
        initial_error: pf.initial_error,
        probe: p.is_torus(),
        ..SolveConfig::default()
    };
    let planned = plan(p, eps, &cfg)?;
    let reference = if p.is_torus() && p.dim() <= ORACLE_MAX_DIM {
        let k = opts
            .oracle_k
            .unwrap_or_else(|| reference_truncation(p, planned.steps));
        Some(galerkin_solve(p, k)?)
    } else {
        None
    };
    let o = solve(p, eps, &cfg, reference.as_ref().map(|r| &r.field))?;

    write(out, "ledger.csv", &o.state.ledger_csv())?;
    write(out, "solution.atoms", &o.u.to_text())?;
    let mut summary = String::new();
    let mode = if p.is_torus() {
        "torus benchmark"
    } else {
        "whole space"
    };
    summary.push_str(&format!("mode = {mode}\n"));
    summary.push_str(&format!("dimension = {}\n", p.dim()));
    summary.push_str(&format!("epsilon = {eps:e}\n"));
    summary.push_str(&format!("T = {}\n", o.plan.steps));
    summary.push_str(&format!("alpha_star = {:e}\n", o.plan.alpha));
    summary.push_str(&format!("contraction_star = {:e}\n", o.plan.contraction));
    summary.push_str(&format!(
        "initial_error_bound = {:e}\n",
        o.plan.initial_error
    ));
    summary.push_str(&format!("prune_budget = {:e}\n", o.plan.prune_budget));
    summary.push_str(&format!("prune_budget_used = {:e}\n", o.state.budget_used));
    summary.push_str(&format!("atom_count = {}\n", o.u.len()));
    summary.push_str(&format!("tracked_norm = {:e}\n", o.u.tracked_norm()));
    summary.push_str(&format!("support_radius = {:e}\n", o.u.support_radius()));
    if p.is_torus() && eps < 0.5 {
        let pred = main_theorem_predictor(p, eps)?;
        summary.push_str(&format!("predicted_norm_Y_T = {:e}\n", pred.norm));
        summary.push_str(&format!("predicted_radius = {:e}\n", pred.radius));
    }
    if let Some(r) = &reference {
        let err = h1_distance(&o.u, &r.field)?;
        summary.push_str(&format!("final_h1_error = {err:e}\n"));
        write(out, "reference.atoms", &r.field.to_text())?;
        let comparison = format!(
            "mode = torus benchmark\ntruncation_K = {}\nunknowns = {}\ngalerkin_relative_residual = {:e}\nfinal_h1_error = {err:e}\nepsilon = {eps:e}\nwithin_epsilon = {}\n",
            r.field.truncation(),
            r.unknowns,
            r.relative_residual,
            err <= eps
        );
        write(out, "oracle_comparison.txt", &comparison)?;
    }
    write(out, "summary.txt", &summary)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RateOptions {
    pub widths: Vec<usize>,
    pub trials: usize,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
}

pub fn run_rate_study(file: &Path, out: &Path, opts: &RateOptions) -> Result<()> {
    let pf = ProblemFile::read(file)?;
    let g = match &pf.target {
        Some(Target::Atoms(g)) => g.clone(),
        Some(Target::Solve) => {
            let eps = opts.epsilon.or(pf.epsilon).ok_or_else(missing_epsilon)?;
            let cfg = SolveConfig {
                prune_budget: pf.prune_budget,
                initial_error: pf.initial_error,
                probe: pf.problem.is_torus(),
                ..SolveConfig::default()
            };
            solve(&pf.problem, eps, &cfg, None)?.u
        }
        None => {
            return Err(Error::Parse {
                line: 0,
                detail: "rate-study needs a [target] section or `target solve`".into(),
            }
            .into())
        }
    };
    let seed = opts.seed.or(pf.seed).unwrap_or(0);
    let study = rate_study(&g, &opts.widths, opts.trials, seed)?;
    write(out, "target.atoms", &g.to_text())?;
    write(out, "trials.csv", &study.trials_csv())?;
    write(out, "summary.csv", &study.summary_csv())?;
    Ok(())
}

pub fn run_scaling_report(template: &str, dims: &[usize], eps: f64, out: &Path) -> Result<()> {
    if template != "diag-cos" {
        anyhow::bail!(Error::InvalidArgument(format!(
            "unknown template `{template}` (available: diag-cos)"
        )));
    }
    let (rows, seconds) = scaling_rows(dims, eps)?;
    write(out, "scaling.csv", &rows_csv(&rows))?;
    write(out, "scaling_fit.txt", &fit_report(&rows, eps))?;
    write(out, "timing.csv", &timing_csv(&rows, &seconds))?;
    if let Some(r) = rows.iter().find(|r| r.tracked_norm > r.y_t) {
        return Err(Error::LedgerViolation {
            step: r.steps,
            detail: format!(
                "d = {}: tracked norm {} exceeds Y_T = {}",
                r.dim, r.tracked_norm, r.y_t
            ),
        }
        .into());
    }
    Ok(())
}

/// Runs the suite and writes `validate.csv`; failing checks are returned,
/// not raised.
pub fn validate_checks(out: &Path, seed: u64) -> Result<Vec<Check>> {
    let checks = run_suite(seed)?;
    write(out, "validate.csv", &checks_csv(&checks))?;
    Ok(checks)
}

pub fn ensure_all_passed(checks: &[Check]) -> Result<()> {
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(ValidationFailed { failed }.into());
    }
    Ok(())
}

pub fn run_validate(out: &Path, seed: u64) -> Result<()> {
    ensure_all_passed(&validate_checks(out, seed)?)
}
