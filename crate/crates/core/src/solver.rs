//! Preconditioned Richardson iteration `u ← u − α (I − Δ)⁻¹ (Lu − f)` with
//! a Barron-norm ledger.
//!
//! Each step is checked against the cosine growth recursion
//!
//! ```text
//! ‖u_{t+1}‖ ≤ (6α ℓ_A max{R_A², 1} d² + α ℓ_c + 1) ‖u_t‖ + α ℓ_f
//! R_{t+1}   ≤ R_t + max{R_A, R_c, R_f}
//! ```
//!
//! and a violation aborts the solve: it can only come from an algebra bug.

use crate::atoms::AtomSum;
use crate::calculus::{apply_elliptic, precondition};
use crate::error::{Error, Result};
use crate::oracle::{self, SpectralField};
use crate::problem::EllipticProblem;

/// Relative slack on ledger inequalities; absorbs summation-order rounding
/// in the tracked norm and in `√` of integer frequency norms.
pub const LEDGER_SLACK: f64 = 1e-12;

/// `(α*, Λ*) = (2/(λ_min + λ_max), (λ_max − λ_min)/(λ_max + λ_min))`.
pub fn optimal_step(lambda_min: f64, lambda_max: f64) -> Result<(f64, f64)> {
    if !(lambda_min > 0.0 && lambda_max >= lambda_min && lambda_max.is_finite()) {
        return Err(Error::InvalidSpectralBounds {
            min: lambda_min,
            max: lambda_max,
        });
    }
    let s = lambda_min + lambda_max;
    Ok((2.0 / s, (lambda_max - lambda_min) / s))
}

/// Smallest `T` with `Λ*^T · initial_error ≤ ε`.
pub fn iteration_count_bound(
    lambda_min: f64,
    lambda_max: f64,
    initial_error: f64,
    eps: f64,
) -> Result<usize> {
    optimal_step(lambda_min, lambda_max)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {eps}"
        )));
    }
    if !(initial_error > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "initial error must be positive, got {initial_error}"
        )));
    }
    if initial_error <= eps {
        return Ok(0);
    }
    if lambda_min == lambda_max {
        return Ok(1);
    }
    let rate = ((lambda_max + lambda_min) / (lambda_max - lambda_min)).ln();
    Ok(((initial_error / eps).ln() / rate).ceil() as usize)
}

/// `(6α ℓ_A max{R_A², 1} d² + α ℓ_c + 1) · norm_t + α ℓ_f`.
pub fn cosine_ledger_bound(p: &EllipticProblem, alpha: f64, norm_t: f64) -> f64 {
    cosine_growth_factor(p, alpha) * norm_t + alpha * p.l_f()
}

fn cosine_growth_factor(p: &EllipticProblem, alpha: f64) -> f64 {
    let d = p.dim() as f64;
    6.0 * alpha * p.l_a() * p.r_a().powi(2).max(1.0) * d * d + alpha * p.l_c() + 1.0
}

/// One row of the iteration ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub t: usize,
    pub atom_count: usize,
    pub tracked_norm: f64,
    pub support_radius: f64,
    /// Mass removed by pruning at this step.
    pub dropped_mass: f64,
    /// H¹ bound on the pruning perturbation at this step.
    pub prune_h1_bound: f64,
    /// H¹ distance to the spectral reference, when one is supplied.
    pub h1_error: Option<f64>,
    /// Cosine recursion bound evaluated on the previous tracked norm.
    pub cosine_bound: Option<f64>,
    /// `Y_t` of the closed-form recursion.
    pub y_t: f64,
}

/// Current iterate and its ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub t: usize,
    pub u: AtomSum,
    pub ledger: Vec<LedgerEntry>,
    /// Accumulated H¹ bound of everything pruned so far.
    pub budget_used: f64,
}

impl IterationState {
    pub fn new(u0: AtomSum) -> Self {
        let entry = LedgerEntry {
            t: 0,
            atom_count: u0.len(),
            tracked_norm: u0.tracked_norm(),
            support_radius: u0.support_radius(),
            dropped_mass: 0.0,
            prune_h1_bound: 0.0,
            h1_error: None,
            cosine_bound: None,
            y_t: u0.tracked_norm(),
        };
        Self {
            t: 0,
            u: u0,
            ledger: vec![entry],
            budget_used: 0.0,
        }
    }

    pub fn last(&self) -> &LedgerEntry {
        self.ledger
            .last()
            .expect("ledger starts with the initial iterate")
    }

    /// The ledger as CSV with header
    /// `t,atom_count,tracked_norm,support_radius,dropped_mass,h1_error_vs_oracle,cosine_bound,Y_t`.
    /// Missing values are written as empty fields.
    pub fn ledger_csv(&self) -> String {
        let mut out =
            String::from("t,atom_count,tracked_norm,support_radius,dropped_mass,h1_error_vs_oracle,cosine_bound,Y_t\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        for e in &self.ledger {
            out.push_str(&format!(
                "{},{},{:?},{:?},{:?},{},{},{:?}\n",
                e.t,
                e.atom_count,
                e.tracked_norm,
                e.support_radius,
                e.dropped_mass,
                opt(e.h1_error),
                opt(e.cosine_bound),
                e.y_t
            ));
        }
        out
    }
}

enum Pruning {
    Threshold(f64),
    /// H¹ budget for this step.
    Budget(f64),
}

/// Largest threshold whose removed mass stays within `mass_budget`.
fn threshold_for_budget(s: &AtomSum, mass_budget: f64) -> f64 {
    let mut amps: Vec<f64> = s.atoms().iter().map(|a| a.amplitude.abs()).collect();
    amps.sort_by(f64::total_cmp);
    let mut cum = 0.0;
    for &a in &amps {
        if cum + a > mass_budget {
            return a;
        }
        cum += a;
    }
    f64::INFINITY
}

/// One preconditioned Richardson step followed by amplitude-threshold pruning.
pub fn step(
    p: &EllipticProblem,
    state: &IterationState,
    alpha: f64,
    prune_threshold: f64,
) -> Result<IterationState> {
    advance(p, state, alpha, Pruning::Threshold(prune_threshold))
}

fn advance(
    p: &EllipticProblem,
    state: &IterationState,
    alpha: f64,
    pruning: Pruning,
) -> Result<IterationState> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step size must be non-negative, got {alpha}"
        )));
    }
    let u = &state.u;
    let residual = apply_elliptic(p, u)?.sub(p.f())?;
    let next = u.sub(&precondition(&residual).scale(alpha))?;
    let threshold = match pruning {
        Pruning::Threshold(t) => t,
        Pruning::Budget(h1) => {
            let per_mass = (1.0 + next.support_radius().powi(2)).sqrt();
            threshold_for_budget(&next, h1 / per_mass)
        }
    };
    let radius_before_prune = next.support_radius();
    let (next, dropped) = next.prune(threshold)?;
    let prune_h1_bound = dropped * (1.0 + radius_before_prune.powi(2)).sqrt();

    let t = state.t + 1;
    let prev = state.last();
    let bound = cosine_ledger_bound(p, alpha, prev.tracked_norm);
    let y_t = cosine_growth_factor(p, alpha) * prev.y_t + alpha * p.l_f();
    let norm = next.tracked_norm();
    if norm > bound * (1.0 + LEDGER_SLACK) {
        return Err(Error::LedgerViolation {
            step: t,
            detail: format!("tracked norm {norm} exceeds cosine bound {bound}"),
        });
    }
    if norm > y_t * (1.0 + LEDGER_SLACK) {
        return Err(Error::LedgerViolation {
            step: t,
            detail: format!("tracked norm {norm} exceeds Y_t = {y_t}"),
        });
    }
    let radius_cap = prev.support_radius + p.radius_increment();
    if next.support_radius() > radius_cap * (1.0 + LEDGER_SLACK) {
        return Err(Error::LedgerViolation {
            step: t,
            detail: format!(
                "support radius {} exceeds {radius_cap}",
                next.support_radius()
            ),
        });
    }
    let mut ledger = state.ledger.clone();
    ledger.push(LedgerEntry {
        t,
        atom_count: next.len(),
        tracked_norm: norm,
        support_radius: next.support_radius(),
        dropped_mass: dropped,
        prune_h1_bound,
        h1_error: None,
        cosine_bound: Some(bound),
        y_t,
    });
    Ok(IterationState {
        t,
        u: next,
        ledger,
        budget_used: state.budget_used + prune_h1_bound,
    })
}

/// Options for [`solve`].
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub prune: bool,
    /// Total H¹ pruning budget; defaults to ε/2.
    pub prune_budget: Option<f64>,
    /// Starting iterate; `None` means `u₀ = 0`.
    pub warm_start: Option<AtomSum>,
    /// Overrides the H¹ bound on `‖u₀ − u*‖` used for planning.
    pub initial_error: Option<f64>,
    /// Opt-in early exit once the H¹ norm of an update drops below this.
    pub residual_tol: Option<f64>,
    /// Run the ellipticity probe before iterating.
    pub probe: bool,
    pub probe_refinements: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            prune: true,
            prune_budget: None,
            warm_start: None,
            initial_error: None,
            residual_tol: None,
            probe: true,
            probe_refinements: 6,
        }
    }
}

/// The planned iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvePlan {
    pub steps: usize,
    pub alpha: f64,
    pub contraction: f64,
    pub initial_error: f64,
    /// Total H¹ pruning budget (0 when pruning is disabled).
    pub prune_budget: f64,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub u: AtomSum,
    pub state: IterationState,
    pub plan: SolvePlan,
    pub final_h1_error: Option<f64>,
}

fn initial_error_bound(
    p: &EllipticProblem,
    u0: Option<&AtomSum>,
    cfg: &SolveConfig,
) -> Result<f64> {
    if let Some(e) = cfg.initial_error {
        return Ok(e);
    }
    if !p.is_torus() {
        return Err(Error::InvalidArgument(
            "whole-space problems need an explicit initial error bound".into(),
        ));
    }
    // ‖u*‖_{H¹} ≤ ‖f‖_{H⁻¹} / λ_min
    let solution_bound = p.f().h_minus1_norm_torus()? / p.lambda_min();
    let start = match u0 {
        Some(u) => u.h1_norm_torus()?,
        None => 0.0,
    };
    Ok(solution_bound + start)
}

/// Plans `T` against ε/2 and reserves the other ε/2 for pruning.
pub fn plan(p: &EllipticProblem, eps: f64, cfg: &SolveConfig) -> Result<SolvePlan> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {eps}"
        )));
    }
    let (alpha, contraction) = optimal_step(p.lambda_min(), p.lambda_max())?;
    let initial_error = initial_error_bound(p, cfg.warm_start.as_ref(), cfg)?;
    let steps = if initial_error > 0.0 {
        iteration_count_bound(p.lambda_min(), p.lambda_max(), initial_error, eps / 2.0)?
    } else {
        0
    };
    let prune_budget = if cfg.prune {
        cfg.prune_budget.unwrap_or(eps / 2.0)
    } else {
        0.0
    };
    Ok(SolvePlan {
        steps,
        alpha,
        contraction,
        initial_error,
        prune_budget,
    })
}

/// Runs the planned number of steps from `u₀` with the optimal step size.
///
/// When `reference` is given (torus mode), each ledger row records the H¹
/// distance of the iterate to it.
pub fn solve(
    p: &EllipticProblem,
    eps: f64,
    cfg: &SolveConfig,
    reference: Option<&SpectralField>,
) -> Result<SolveOutcome> {
    if cfg.probe {
        oracle::ellipticity_probe(p, cfg.probe_refinements)?;
    }
    let plan = plan(p, eps, cfg)?;
    let u0 = cfg
        .warm_start
        .clone()
        .unwrap_or_else(|| AtomSum::zero(p.dim(), p.is_torus()));
    let mut state = IterationState::new(u0);
    if let Some(r) = reference {
        state.ledger[0].h1_error = Some(oracle::h1_distance(&state.u, r)?);
    }
    let per_step = if plan.steps > 0 {
        plan.prune_budget / plan.steps as f64
    } else {
        0.0
    };
    for _ in 0..plan.steps {
        let pruning = if cfg.prune {
            Pruning::Budget(per_step)
        } else {
            Pruning::Threshold(0.0)
        };
        let mut next = advance(p, &state, plan.alpha, pruning)?;
        if let Some(r) = reference {
            let err = oracle::h1_distance(&next.u, r)?;
            next.ledger.last_mut().expect("nonempty").h1_error = Some(err);
        }
        let update_norm = match cfg.residual_tol {
            Some(_) => Some(next.u.sub(&state.u)?.h1_norm_torus()?),
            None => None,
        };
        state = next;
        if let (Some(tol), Some(n)) = (cfg.residual_tol, update_norm) {
            if n <= tol {
                break;
            }
        }
    }
    let final_h1_error = state.last().h1_error;
    Ok(SolveOutcome {
        u: state.u.clone(),
        state,
        plan,
        final_h1_error,
    })
}

/// Closed-form predictions for a solve at tolerance ε.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremPrediction {
    pub steps: usize,
    pub alpha: f64,
    /// `max{R_A, R_c, R_f} · T`.
    pub radius: f64,
    /// `Y_T`.
    pub norm: f64,
}

/// `T` (planned exactly as [`solve`] plans it, against ε/2 from `u₀ = 0`),
/// the radius `max{R_A,R_c,R_f}·T` and the closed form
/// `Y_T = α ℓ_f (F^T − 1)/(F − 1)` with `F` the cosine growth factor.
pub fn main_theorem_predictor(p: &EllipticProblem, eps: f64) -> Result<TheoremPrediction> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must lie in (0, 1/2), got {eps}"
        )));
    }
    let cfg = SolveConfig {
        probe: false,
        ..SolveConfig::default()
    };
    let plan = plan(p, eps, &cfg)?;
    let steps = plan.steps;
    let alpha = plan.alpha;
    let growth = cosine_growth_factor(p, alpha) - 1.0;
    let norm = if steps == 0 {
        0.0
    } else if growth == 0.0 {
        alpha * p.l_f() * steps as f64
    } else {
        alpha * p.l_f() * ((1.0 + growth).powi(steps as i32) - 1.0) / growth
    };
    Ok(TheoremPrediction {
        steps,
        alpha,
        radius: p.radius_increment() * steps as f64,
        norm,
    })
}
