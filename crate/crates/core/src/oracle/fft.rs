//! Grid check of the atomwise preconditioner against the discrete Fourier
//! multiplier `1/(1 + ‖k‖²)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::atoms::AtomSum;
use crate::calculus::precondition;
use crate::error::{Error, Result};

/// Grids larger than this are refused.
pub const MAX_GRID_POINTS: usize = 1 << 24;

/// In-place transform of a row-major `n^d` array along every axis.
fn fft_nd(data: &mut [Complex64], n: usize, dim: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(n, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let total = data.len();
    for axis in 0..dim {
        let stride = n.pow(axis as u32);
        for base in 0..total {
            // visit each line once: the axis digit of its first element is 0
            if (base / stride) % n != 0 {
                continue;
            }
            for (i, v) in line.iter_mut().enumerate() {
                *v = data[base + i * stride];
            }
            fft.process(&mut line);
            for (i, v) in line.iter().enumerate() {
                data[base + i * stride] = *v;
            }
        }
    }
}

fn grid_point(mut idx: usize, n: usize, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let i = idx % n;
            idx /= n;
            TAU * i as f64 / n as f64
        })
        .collect()
}

/// Maximum absolute discrepancy on an `n^d` grid between the FFT-applied
/// multiplier and [`precondition`] evaluated pointwise.
pub fn fft_precondition_check(s: &AtomSum, grid_points_per_axis: usize) -> Result<f64> {
    if !s.is_torus() {
        return Err(Error::NotTorus);
    }
    let n = grid_points_per_axis;
    let dim = s.dim();
    let needed = 2 * s.max_abs_frequency() as usize + 1;
    if n < needed {
        return Err(Error::UnderResolved(format!(
            "{n} points per axis cannot resolve frequency {}",
            s.max_abs_frequency()
        )));
    }
    let total = n
        .checked_pow(dim as u32)
        .filter(|&t| t <= MAX_GRID_POINTS)
        .ok_or_else(|| {
            Error::UnderResolved(format!("{n}^{dim} grid exceeds {MAX_GRID_POINTS} points"))
        })?;

    let mut data: Vec<Complex64> = (0..total)
        .map(|idx| Complex64::new(s.value_at(&grid_point(idx, n, dim)), 0.0))
        .collect();
    fft_nd(&mut data, n, dim, FftDirection::Forward);
    for (idx, v) in data.iter_mut().enumerate() {
        let mut rem = idx;
        let mut k2 = 0.0;
        for _ in 0..dim {
            let i = rem % n;
            rem /= n;
            let k = if i <= n / 2 {
                i as f64
            } else {
                i as f64 - n as f64
            };
            k2 += k * k;
        }
        *v /= 1.0 + k2;
    }
    fft_nd(&mut data, n, dim, FftDirection::Inverse);

    let target = precondition(s);
    let scale = total as f64;
    Ok(data
        .iter()
        .enumerate()
        .map(|(idx, v)| (v.re / scale - target.value_at(&grid_point(idx, n, dim))).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::Atom;
    use crate::fixtures::random_sum;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_and_constant_atoms() {
        let s = AtomSum::new(2, true, vec![Atom::new(1.0, vec![1.0, 0.0], 0.0)]).unwrap();
        assert!(fft_precondition_check(&s, 8).unwrap() <= 1e-12);
        let c = AtomSum::constant(2, true, 3.0);
        assert!(fft_precondition_check(&c, 4).unwrap() <= 1e-14);
    }

    #[test]
    fn random_sum_2d() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let s = random_sum(&mut rng, 2, 20, 5, true);
        assert!(fft_precondition_check(&s, 16).unwrap() <= 1e-11);
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let s = AtomSum::new(1, true, vec![Atom::new(1.0, vec![4.0], 0.0)]).unwrap();
        assert!(matches!(
            fft_precondition_check(&s, 8),
            Err(Error::UnderResolved(_))
        ));
        assert!(fft_precondition_check(&s, 9).is_ok());
    }
}
