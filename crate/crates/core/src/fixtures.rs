//! Seeded random atom sums and the benchmark problems used by tests, the
//! validation suite and the benchmarks.

use std::f64::consts::TAU;

use rand::Rng;

use crate::atoms::{Atom, AtomSum};
use crate::problem::EllipticProblem;

/// A random canonical sum with exactly `n` atoms when the frequency box
/// `[-max_freq, max_freq]^dim` has room for them. Amplitudes are drawn with
/// magnitude in `[0.1, 1]` and random sign.
pub fn random_sum<R: Rng>(
    rng: &mut R,
    dim: usize,
    n: usize,
    max_freq: i64,
    torus: bool,
) -> AtomSum {
    let mut s = AtomSum::zero(dim, torus);
    let mut attempts = 0;
    while s.len() < n && attempts < 100 * n + 100 {
        attempts += 1;
        let frequency: Vec<f64> = (0..dim)
            .map(|_| {
                if torus {
                    rng.random_range(-max_freq..=max_freq) as f64
                } else {
                    rng.random_range(-(max_freq as f64)..=max_freq as f64)
                }
            })
            .collect();
        let magnitude = rng.random_range(0.1..=1.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let phase = rng.random_range(0.0..TAU);
        let candidate = AtomSum::new(
            dim,
            torus,
            vec![Atom::new(sign * magnitude, frequency, phase)],
        )
        .expect("random atom is well formed");
        if candidate.is_empty() {
            continue;
        }
        let key = &candidate.atoms()[0].frequency;
        if s.atoms().iter().any(|a| &a.frequency == key) {
            continue;
        }
        s = s.add(&candidate).expect("same dimension");
    }
    s
}

/// Uniform points in `[0, 2π)^dim`.
pub fn random_points<R: Rng>(rng: &mut R, dim: usize, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..TAU)).collect())
        .collect()
}

fn cos_axis(dim: usize, axis: usize, amplitude: f64) -> Atom {
    let mut w = vec![0.0; dim];
    w[axis] = 1.0;
    Atom::new(amplitude, w, 0.0)
}

/// `A = I`, `c = 1`, `f = cos x₁` with `λ_min = λ_max = 1`.
pub fn identity_problem(dim: usize) -> EllipticProblem {
    let f = AtomSum::new(dim, true, vec![cos_axis(dim, 0, 1.0)]).unwrap();
    EllipticProblem::isotropic(dim, true, AtomSum::constant(dim, true, 1.0), f, 1.0, 1.0).unwrap()
}

/// `d = 1`: `A = 2 + cos x`, `c = 1`, `f = cos x`, `λ = (1, 3)`.
pub fn benchmark_1d() -> EllipticProblem {
    let a = AtomSum::new(1, true, vec![Atom::constant(1, 2.0), cos_axis(1, 0, 1.0)]).unwrap();
    let c = AtomSum::constant(1, true, 1.0);
    let f = AtomSum::new(1, true, vec![cos_axis(1, 0, 1.0)]).unwrap();
    EllipticProblem::new(vec![vec![a]], c, f, 1.0, 3.0).unwrap()
}

/// `d = 2`: `A = diag(2 + cos x₁, 2 + cos x₂)`, `c = 1 + ½cos(x₁ + x₂)`,
/// `f = cos x₁ + cos x₂`, `λ = (½, 3)`.
pub fn benchmark_2d() -> EllipticProblem {
    let d = 2;
    let entry = |axis| {
        AtomSum::new(
            d,
            true,
            vec![Atom::constant(d, 2.0), cos_axis(d, axis, 1.0)],
        )
        .unwrap()
    };
    let a = vec![
        vec![entry(0), AtomSum::zero(d, true)],
        vec![AtomSum::zero(d, true), entry(1)],
    ];
    let c = AtomSum::new(
        d,
        true,
        vec![Atom::constant(d, 1.0), Atom::new(0.5, vec![1.0, 1.0], 0.0)],
    )
    .unwrap();
    let f = AtomSum::new(d, true, vec![cos_axis(d, 0, 1.0), cos_axis(d, 1, 1.0)]).unwrap();
    EllipticProblem::new(a, c, f, 0.5, 3.0).unwrap()
}

/// The dimension-scaling family: `A = I + ½ diag(cos xᵢ)`, `c = 1`,
/// `f = (1/d) Σ cos xᵢ` (unit tracked norm), `λ = (½, 3/2)`.
pub fn scaling_template(dim: usize) -> EllipticProblem {
    let zero = AtomSum::zero(dim, true);
    let a = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    if i == j {
                        AtomSum::new(
                            dim,
                            true,
                            vec![Atom::constant(dim, 1.0), cos_axis(dim, i, 0.5)],
                        )
                        .unwrap()
                    } else {
                        zero.clone()
                    }
                })
                .collect()
        })
        .collect();
    let f = AtomSum::new(
        dim,
        true,
        (0..dim)
            .map(|i| cos_axis(dim, i, 1.0 / dim as f64))
            .collect(),
    )
    .unwrap();
    EllipticProblem::new(a, AtomSum::constant(dim, true, 1.0), f, 0.5, 1.5).unwrap()
}
