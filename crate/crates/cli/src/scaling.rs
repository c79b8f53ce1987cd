//! Dimension-scaling report for the `diag-cos` template family.

use std::time::Instant;

use barron_core::fixtures::scaling_template;
use barron_core::{main_theorem_predictor, solve, Result, SolveConfig};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub dim: usize,
    pub steps: usize,
    pub tracked_norm: f64,
    pub y_t: f64,
    pub predicted_norm: f64,
    pub support_radius: f64,
    pub atom_count: usize,
}

/// Solves the template at every dimension; the second vector holds wall
/// times in seconds, kept apart so the rows stay deterministic.
pub fn scaling_rows(dims: &[usize], eps: f64) -> Result<(Vec<ScalingRow>, Vec<f64>)> {
    let results = dims
        .par_iter()
        .map(|&d| {
            let start = Instant::now();
            let p = scaling_template(d);
            let o = solve(&p, eps, &SolveConfig::default(), None)?;
            let pred = main_theorem_predictor(&p, eps)?;
            let row = ScalingRow {
                dim: d,
                steps: o.plan.steps,
                tracked_norm: o.u.tracked_norm(),
                y_t: o.state.last().y_t,
                predicted_norm: pred.norm,
                support_radius: o.u.support_radius(),
                atom_count: o.u.len(),
            };
            Ok((row, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(results.into_iter().unzip())
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// usable points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

pub fn rows_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from("d,T,tracked_norm,Y_T,predicted_norm,support_radius,atom_count\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:e},{:e},{:e},{:e},{}\n",
            r.dim, r.steps, r.tracked_norm, r.y_t, r.predicted_norm, r.support_radius, r.atom_count
        ));
    }
    out
}

/// Fitted d-exponents of the final tracked norm and of `Y_T`.
pub fn fit_report(rows: &[ScalingRow], eps: f64) -> String {
    let fit = |f: fn(&ScalingRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.dim as f64, f(r))).collect();
        match loglog_slope(&pts) {
            Some(s) => format!("{s:.6}"),
            None => "degenerate".to_string(),
        }
    };
    let mut out = String::new();
    out.push_str("template = diag-cos\n");
    out.push_str("mode = torus benchmark\n");
    out.push_str(&format!("epsilon = {eps:e}\n"));
    out.push_str(&format!("abs_ln_epsilon = {:.6}\n", eps.ln().abs()));
    out.push_str(&format!(
        "fitted_norm_exponent = {}\n",
        fit(|r| r.tracked_norm)
    ));
    out.push_str(&format!("predictor_exponent = {}\n", fit(|r| r.y_t)));
    let ledger_ok = rows.iter().all(|r| r.tracked_norm <= r.y_t);
    out.push_str(&format!("ledger_tracked_le_Y_T = {ledger_ok}\n"));
    out
}

pub fn timing_csv(rows: &[ScalingRow], seconds: &[f64]) -> String {
    let mut out = String::from("d,wall_seconds\n");
    for (r, s) in rows.iter().zip(seconds) {
        out.push_str(&format!("{},{s:.6}\n", r.dim));
    }
    out
}
