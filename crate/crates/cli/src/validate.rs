//! The invariant suite behind `barron validate`.
//!
//! Each criterion returns one [`Check`] per measured quantity; a criterion
//! passes when all of its checks pass.

use barron_core::fixtures::{
    benchmark_1d, benchmark_2d, identity_problem, random_points, random_sum,
};
use barron_core::{
    default_truncation, fft_precondition_check, galerkin_solve, green1d_check, h1_distance,
    main_theorem_predictor, optimal_step, partial_derivative, precondition, product, rate_study,
    solve, step, AtomSum, EllipticProblem, IterationState, Result, SolveConfig, SolveOutcome,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scaling::{scaling_rows, ScalingRow};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: usize,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    fn at_most(criterion: usize, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    fn within(criterion: usize, name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            tolerance: hi,
            passed: (lo..=hi).contains(&value),
        }
    }
}

pub fn checks_csv(checks: &[Check]) -> String {
    let mut out = String::from("criterion,check,status,value,tolerance\n");
    for c in checks {
        out.push_str(&format!(
            "{},{},{},{:e},{:e}\n",
            c.criterion,
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.value,
            c.tolerance
        ));
    }
    out
}

const ORACLE_POINTS: usize = 1000;
const FD_STEP: f64 = 1e-5;

/// `(dim, max frequency)` pairs that leave room for 50 distinct atoms.
const ALGEBRA_CASES: [(usize, i64); 4] = [(1, 60), (2, 6), (3, 3), (8, 1)];

fn relative_gap(got: f64, expect: f64) -> f64 {
    (got - expect).abs() / expect.abs().max(1.0)
}

/// Criterion 1: product, first derivatives and the preconditioner against
/// pointwise multiplication, central differences and an FFT multiplier.
pub fn algebra_oracles(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (dim, max_freq) in ALGEBRA_CASES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (dim as u64) << 8);
        let s1 = random_sum(&mut rng, dim, 50, max_freq, true);
        let s2 = random_sum(&mut rng, dim, 50, max_freq, true);
        let points = random_points(&mut rng, dim, ORACLE_POINTS);
        let p = product(&s1, &s2)?;
        let derivs = (0..dim)
            .map(|i| partial_derivative(&s1, i))
            .collect::<Result<Vec<_>>>()?;
        let mut prod_gap: f64 = 0.0;
        let mut deriv_err: f64 = 0.0;
        let mut deriv_scale: f64 = 0.0;
        for x in &points {
            prod_gap = prod_gap.max(relative_gap(p.value_at(x), s1.value_at(x) * s2.value_at(x)));
            for (i, d) in derivs.iter().enumerate() {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += FD_STEP;
                xm[i] -= FD_STEP;
                let fd = (s1.value_at(&xp) - s1.value_at(&xm)) / (2.0 * FD_STEP);
                let v = d.value_at(x);
                deriv_err = deriv_err.max((v - fd).abs());
                deriv_scale = deriv_scale.max(v.abs());
            }
        }
        // sup-norm relative error: the O(h²) term scales with |w|³, not with
        // the local derivative value
        let deriv_gap = deriv_err / deriv_scale.max(1.0);
        let grid = 2 * max_freq as usize + 1;
        let fft_gap = fft_precondition_check(&s1, grid)?;
        out.push(Check::at_most(
            1,
            format!("product_d{dim}"),
            prod_gap,
            1e-12,
        ));
        out.push(Check::at_most(
            1,
            format!("derivative_d{dim}"),
            deriv_gap,
            1e-6,
        ));
        out.push(Check::at_most(
            1,
            format!("precondition_fft_d{dim}"),
            fft_gap,
            1e-11,
        ));
    }
    Ok(out)
}

fn exact_config() -> SolveConfig {
    SolveConfig {
        prune: false,
        ..SolveConfig::default()
    }
}

/// Criterion 2: `A = I, c = 1, f = cos x₁` is solved in one step.
pub fn identity_solve() -> Result<Vec<Check>> {
    let p = identity_problem(1);
    let out = solve(&p, 1e-6, &exact_config(), None)?;
    let exact = precondition(p.f());
    let err = out.u.sub(&exact)?.h1_norm_torus()?;
    Ok(vec![
        Check::at_most(2, "identity_h1_error", err, 1e-14),
        Check::within(2, "identity_steps", out.plan.steps as f64, 1.0, 1.0),
    ])
}

pub const CONTRACTION_STEPS: usize = 12;

/// Largest per-step H¹ error ratio over unpruned steps against a Galerkin
/// reference at truncation `k`.
pub fn max_contraction_ratio(p: &EllipticProblem, k: usize, steps: usize) -> Result<(f64, f64)> {
    let reference = galerkin_solve(p, k)?.field;
    let (alpha, lambda) = optimal_step(p.lambda_min(), p.lambda_max())?;
    let mut state = IterationState::new(AtomSum::zero(p.dim(), true));
    let mut prev = h1_distance(&state.u, &reference)?;
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        state = step(p, &state, alpha, 0.0)?;
        let err = h1_distance(&state.u, &reference)?;
        worst = worst.max(err / prev);
        prev = err;
    }
    Ok((worst, lambda))
}

/// Criterion 3.
pub fn contraction() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, p, k) in [("d1", benchmark_1d(), 48), ("d2", benchmark_2d(), 24)] {
        let (ratio, lambda) = max_contraction_ratio(&p, k, CONTRACTION_STEPS)?;
        out.push(Check::at_most(
            3,
            format!("contraction_{name}"),
            ratio,
            lambda + 1e-9,
        ));
    }
    Ok(out)
}

/// Galerkin truncation used for end-to-end error checks.
pub fn reference_truncation(p: &EllipticProblem, steps: usize) -> usize {
    default_truncation(p, steps).max(24)
}

/// Pruned solves of both benchmarks at `ε ∈ {1e-2, 1e-4}` with the
/// reference error recorded on every ledger row.
pub fn benchmark_solves() -> Result<Vec<(String, f64, EllipticProblem, SolveOutcome)>> {
    let mut out = Vec::new();
    for (name, p) in [("d1", benchmark_1d()), ("d2", benchmark_2d())] {
        for eps in [1e-2, 1e-4] {
            let plan = barron_core::plan(&p, eps, &SolveConfig::default())?;
            let reference = galerkin_solve(&p, reference_truncation(&p, plan.steps))?.field;
            let o = solve(&p, eps, &SolveConfig::default(), Some(&reference))?;
            out.push((name.to_string(), eps, p.clone(), o));
        }
    }
    Ok(out)
}

/// Criterion 4: the planned `T` reaches ε.
pub fn iteration_count(solves: &[(String, f64, EllipticProblem, SolveOutcome)]) -> Vec<Check> {
    solves
        .iter()
        .map(|(name, eps, _, o)| {
            Check::at_most(
                4,
                format!("final_error_{name}_eps{eps:e}"),
                o.final_h1_error.unwrap_or(f64::INFINITY),
                *eps,
            )
        })
        .collect()
}

/// Criterion 5: per-step ledger rows and final values against the predictor.
pub fn ledger(solves: &[(String, f64, EllipticProblem, SolveOutcome)]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, eps, p, o) in solves {
        let inc = p.radius_increment();
        let mut worst_bound: f64 = 0.0;
        let mut worst_radius: f64 = 0.0;
        for pair in o.state.ledger.windows(2) {
            let (prev, row) = (&pair[0], &pair[1]);
            if let Some(b) = row.cosine_bound {
                worst_bound = worst_bound.max(row.tracked_norm - b);
            }
            worst_radius = worst_radius.max(row.support_radius - prev.support_radius - inc);
        }
        let pred = main_theorem_predictor(p, *eps)?;
        let tag = format!("{name}_eps{eps:e}");
        out.push(Check::at_most(
            5,
            format!("ledger_norm_{tag}"),
            worst_bound,
            0.0,
        ));
        out.push(Check::at_most(
            5,
            format!("ledger_radius_{tag}"),
            worst_radius,
            0.0,
        ));
        out.push(Check::at_most(
            5,
            format!("final_norm_vs_Y_T_{tag}"),
            o.u.tracked_norm(),
            pred.norm,
        ));
        out.push(Check::at_most(
            5,
            format!("final_radius_vs_pred_{tag}"),
            o.u.support_radius(),
            pred.radius,
        ));
    }
    Ok(out)
}

pub const RATE_WIDTHS: [usize; 9] = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096];
pub const RATE_TRIALS: usize = 100;

/// The 10-atom rate-study target.
pub fn rate_target(seed: u64) -> AtomSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0xa70));
    random_sum(&mut rng, 2, 10, 3, true)
}

/// Criterion 6.
pub fn monte_carlo_rate(seed: u64) -> Result<Vec<Check>> {
    let g = rate_target(seed);
    let study = rate_study(&g, &RATE_WIDTHS, RATE_TRIALS, seed)?;
    let mut out: Vec<Check> = study
        .rows
        .iter()
        .map(|r| {
            Check::at_most(
                6,
                format!("rms_sq_vs_bound_k{}", r.k),
                r.rms_error.powi(2),
                r.bound.powi(2),
            )
        })
        .collect();
    out.push(Check::within(
        6,
        "loglog_slope",
        study.slope.unwrap_or(f64::NAN),
        -0.6,
        -0.4,
    ));
    Ok(out)
}

/// Criterion 7.
pub fn green_function() -> Result<Vec<Check>> {
    [0.0, 1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|w| {
            Ok(Check::at_most(
                7,
                format!("green1d_w{w}"),
                green1d_check(w, 40.0, 20_000)?,
                1e-6,
            ))
        })
        .collect()
}

/// Criterion 8: pruning at budget ε/2 costs at most the accounted budget.
pub fn pruning_budget() -> Result<Vec<Check>> {
    let p = benchmark_1d();
    let eps = 1e-3;
    let plan = barron_core::plan(&p, eps, &exact_config())?;
    let reference = galerkin_solve(&p, reference_truncation(&p, plan.steps))?.field;
    let pruned = solve(&p, eps, &SolveConfig::default(), Some(&reference))?;
    let full = solve(&p, eps, &exact_config(), Some(&reference))?;
    let excess =
        pruned.final_h1_error.unwrap_or(f64::INFINITY) - full.final_h1_error.unwrap_or(0.0);
    Ok(vec![
        Check::at_most(
            8,
            "prune_excess_vs_accounted",
            excess,
            pruned.state.budget_used,
        ),
        Check::at_most(
            8,
            "accounted_vs_budget",
            pruned.state.budget_used,
            eps / 2.0,
        ),
    ])
}

pub const SCALING_DIMS: [usize; 5] = [1, 2, 4, 8, 16];

/// Criterion 9 from precomputed scaling rows.
pub fn scaling_checks(rows: &[ScalingRow]) -> Vec<Check> {
    rows.iter()
        .map(|r| {
            Check::at_most(
                9,
                format!("tracked_vs_Y_T_d{}", r.dim),
                r.tracked_norm,
                r.y_t,
            )
        })
        .collect()
}

/// Runs criteria 1–9.
pub fn run_suite(seed: u64) -> Result<Vec<Check>> {
    let mut out = algebra_oracles(seed)?;
    out.extend(identity_solve()?);
    out.extend(contraction()?);
    let solves = benchmark_solves()?;
    out.extend(iteration_count(&solves));
    out.extend(ledger(&solves)?);
    out.extend(monte_carlo_rate(seed)?);
    out.extend(green_function()?);
    out.extend(pruning_budget()?);
    let (rows, _) = scaling_rows(&SCALING_DIMS, 1e-2)?;
    out.extend(scaling_checks(&rows));
    Ok(out)
}
