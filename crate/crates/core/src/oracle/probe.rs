//! Dense sampling of the ellipticity constants.
//!
//! For `d ≤ 3` the coefficients are sampled on nested uniform grids with
//! `2·(max frequency) + 1` points per axis, doubled each refinement. Above
//! that a seeded random point cloud is grown instead. Sampled extrema can
//! only under-estimate the true range, so correct user bounds always pass.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fixtures::random_points;
use crate::problem::EllipticProblem;

const MAX_GRID_DIM: usize = 3;
const MAX_PROBE_POINTS: usize = 1 << 22;
const RANDOM_BATCH: usize = 4096;
const STABLE_REL: f64 = 0.01;
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeEstimates {
    pub a_min: f64,
    pub a_max: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub points: usize,
    pub refinements: usize,
}

impl ProbeEstimates {
    fn empty() -> Self {
        Self {
            a_min: f64::INFINITY,
            a_max: f64::NEG_INFINITY,
            c_min: f64::INFINITY,
            c_max: f64::NEG_INFINITY,
            points: 0,
            refinements: 0,
        }
    }

    fn absorb(&mut self, p: &EllipticProblem, x: &[f64]) {
        let (lo, hi) = eigen_range(p, x);
        self.a_min = self.a_min.min(lo);
        self.a_max = self.a_max.max(hi);
        let c = p.c().value_at(x);
        self.c_min = self.c_min.min(c);
        self.c_max = self.c_max.max(c);
        self.points += 1;
    }

    fn stable_against(&self, prev: &ProbeEstimates) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= STABLE_REL * a.abs().max(b.abs());
        close(self.a_min, prev.a_min)
            && close(self.a_max, prev.a_max)
            && close(self.c_min, prev.c_min)
            && close(self.c_max, prev.c_max)
    }
}

fn eigen_range(p: &EllipticProblem, x: &[f64]) -> (f64, f64) {
    let d = p.dim();
    if p.has_diagonal_a() {
        return (0..d)
            .map(|i| p.a(i, i).value_at(x))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
    }
    let m = DMatrix::from_fn(d, d, |i, j| p.a(i, j).value_at(x));
    let eig = SymmetricEigen::new(m).eigenvalues;
    (eig.min(), eig.max())
}

fn grid_pass(p: &EllipticProblem, n: usize, est: &mut ProbeEstimates) {
    let d = p.dim();
    let total = n.pow(d as u32);
    let mut x = vec![0.0; d];
    for idx in 0..total {
        let mut rem = idx;
        for xi in x.iter_mut() {
            *xi = std::f64::consts::TAU * (rem % n) as f64 / n as f64;
            rem /= n;
        }
        est.absorb(p, &x);
    }
}

/// Estimates `(a_min, a_max, c_min, c_max)` and checks the user's
/// `λ_min ≤ min(a_min, c_min)` and `λ_max ≥ max(a_max, c_max)`.
pub fn ellipticity_probe(p: &EllipticProblem, refinement_limit: usize) -> Result<ProbeEstimates> {
    if !p.is_torus() {
        return Err(Error::NotTorus);
    }
    let d = p.dim();
    let mut est = ProbeEstimates::empty();
    if d <= MAX_GRID_DIM {
        let mut n = 2 * p.max_coefficient_frequency() as usize + 1;
        grid_pass(p, n, &mut est);
        for r in 1..=refinement_limit {
            let next_n = 2 * n;
            if next_n.pow(d as u32) > MAX_PROBE_POINTS {
                break;
            }
            // nested grids: the finer pass revisits every coarse point
            let prev = est;
            let mut fine = ProbeEstimates::empty();
            grid_pass(p, next_n, &mut fine);
            est = ProbeEstimates {
                a_min: prev.a_min.min(fine.a_min),
                a_max: prev.a_max.max(fine.a_max),
                c_min: prev.c_min.min(fine.c_min),
                c_max: prev.c_max.max(fine.c_max),
                points: fine.points,
                refinements: r,
            };
            n = next_n;
            if est.stable_against(&prev) {
                break;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut batch = RANDOM_BATCH;
        for x in random_points(&mut rng, d, batch) {
            est.absorb(p, &x);
        }
        for r in 1..=refinement_limit {
            if est.points + batch > MAX_PROBE_POINTS {
                break;
            }
            let prev = est;
            for x in random_points(&mut rng, d, batch) {
                est.absorb(p, &x);
            }
            est.refinements = r;
            batch *= 2;
            if est.stable_against(&prev) {
                break;
            }
        }
    }

    if !(est.a_min > 0.0) {
        return Err(Error::NotElliptic(format!(
            "smallest sampled eigenvalue of A is {}",
            est.a_min
        )));
    }
    if !(est.c_min > 0.0) {
        return Err(Error::NotElliptic(format!(
            "smallest sampled value of c is {}",
            est.c_min
        )));
    }
    let lower = est.a_min.min(est.c_min);
    let upper = est.a_max.max(est.c_max);
    if p.lambda_min() > lower * (1.0 + BOUND_SLACK) {
        return Err(Error::ProbeFailure(format!(
            "lambda_min = {} exceeds sampled minimum {lower}",
            p.lambda_min()
        )));
    }
    if p.lambda_max() < upper * (1.0 - BOUND_SLACK) {
        return Err(Error::ProbeFailure(format!(
            "lambda_max = {} is below sampled maximum {upper}",
            p.lambda_max()
        )));
    }
    Ok(est)
}
