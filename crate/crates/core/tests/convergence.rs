use barron_core::fixtures::{benchmark_1d, benchmark_2d, identity_problem, scaling_template};
use barron_core::{
    galerkin_solve, h1_distance, main_theorem_predictor, optimal_step, precondition, solve, step,
    AtomSum, IterationState, SolveConfig,
};

fn no_prune() -> SolveConfig {
    SolveConfig {
        prune: false,
        ..SolveConfig::default()
    }
}

#[test]
fn unpruned_errors_contract_at_the_optimal_rate() {
    for (p, k) in [(benchmark_1d(), 48), (benchmark_2d(), 24)] {
        let reference = galerkin_solve(&p, k).unwrap().field;
        let (alpha, lambda) = optimal_step(p.lambda_min(), p.lambda_max()).unwrap();
        let mut state = IterationState::new(AtomSum::zero(p.dim(), true));
        let mut prev = h1_distance(&state.u, &reference).unwrap();
        for _ in 0..10 {
            state = step(&p, &state, alpha, 0.0).unwrap();
            let err = h1_distance(&state.u, &reference).unwrap();
            assert!(
                err <= (lambda + 1e-9) * prev,
                "ratio {} > {lambda}",
                err / prev
            );
            prev = err;
        }
    }
}

#[test]
fn benchmarks_reach_tolerance() {
    for eps in [1e-2, 1e-4] {
        for p in [benchmark_1d(), benchmark_2d()] {
            let reference = galerkin_solve(&p, 40).unwrap().field;
            let out = solve(&p, eps, &SolveConfig::default(), Some(&reference)).unwrap();
            let err = out.final_h1_error.unwrap();
            assert!(err <= eps, "d={} eps={eps}: error {err}", p.dim());
            assert_eq!(out.state.ledger.len(), out.plan.steps + 1);
            assert!(out.state.budget_used <= out.plan.prune_budget * (1.0 + 1e-12));
            let pred = main_theorem_predictor(&p, eps).unwrap();
            assert_eq!(pred.steps, out.plan.steps);
            assert!(out.u.tracked_norm() <= pred.norm * (1.0 + 1e-12));
            assert!(out.u.support_radius() <= pred.radius * (1.0 + 1e-12));
        }
    }
}

#[test]
fn pruned_and_unpruned_runs_agree_within_budget() {
    let p = benchmark_1d();
    let eps = 1e-3;
    let pruned = solve(&p, eps, &SolveConfig::default(), None).unwrap();
    let full = solve(&p, eps, &no_prune(), None).unwrap();
    let gap = pruned.u.sub(&full.u).unwrap().h1_norm_torus().unwrap();
    assert!(
        gap <= pruned.state.budget_used + 1e-12,
        "{gap} > {}",
        pruned.state.budget_used
    );
    assert!(pruned.u.len() <= full.u.len());
}

#[test]
fn identity_solve_is_exact_in_one_step() {
    for d in [1, 3] {
        let p = identity_problem(d);
        let out = solve(&p, 1e-6, &no_prune(), None).unwrap();
        assert_eq!(out.plan.steps, 1);
        assert!(
            out.u
                .sub(&precondition(p.f()))
                .unwrap()
                .h1_norm_torus()
                .unwrap()
                <= 1e-14
        );
    }
}

#[test]
fn scaling_template_stays_separable() {
    for d in [1, 4, 16] {
        let p = scaling_template(d);
        let out = solve(&p, 1e-2, &SolveConfig::default(), None).unwrap();
        for a in out.u.atoms() {
            assert!(a.frequency.iter().filter(|&&w| w != 0.0).count() <= 1);
        }
        assert!(out.u.tracked_norm() <= out.state.last().y_t * (1.0 + 1e-12));
    }
}
