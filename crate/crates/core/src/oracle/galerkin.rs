//! Spectral Galerkin reference solve on the torus.
//!
//! With `u = Σ_m û_m e^{im·x}` over the box `‖m‖_∞ ≤ K`, the weak form
//! tested against `e^{ik·x}` gives the Hermitian system
//!
//! ```text
//! Σ_m ( Σ_ij k_i Â_ij(k − m) m_j + ĉ(k − m) ) û_m = f̂_k
//! ```
//!
//! where `Â_ij(q)`, `ĉ(q)`, `f̂_k` are exponential Fourier coefficients read
//! directly off the atoms. The matrix is banded in frequency (only `q` in the
//! coefficient support couple), stored sparse and solved by Jacobi
//! preconditioned conjugate gradients.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::SpectralField;
use crate::atoms::AtomSum;
use crate::error::{Error, Result};
use crate::problem::EllipticProblem;

const CG_TOL: f64 = 1e-14;
const ACCEPT_RESIDUAL: f64 = 1e-10;

/// Reference field together with solve diagnostics.
#[derive(Debug, Clone)]
pub struct GalerkinSolution {
    pub field: SpectralField,
    /// `‖Mû − f̂‖ / ‖f̂‖` within the truncated span.
    pub relative_residual: f64,
    /// `‖Mû − f̂‖` in the normalized L² norm.
    pub residual_l2: f64,
    pub iterations: usize,
    pub unknowns: usize,
}

/// `K = max|f freq| + T · max|coefficient freq| + 2`, enough to hold every
/// frequency the first `T` iterates can reach.
pub fn default_truncation(p: &EllipticProblem, steps: usize) -> usize {
    let f = p.f().max_abs_frequency();
    let coeff = p.max_coefficient_frequency().max(f);
    (f + steps as f64 * coeff).ceil() as usize + 2
}

/// Exponential Fourier coefficients `q ↦ ĝ(q)` of an integer-frequency sum.
fn exponential_coefficients(s: &AtomSum) -> Result<BTreeMap<Vec<i64>, Complex64>> {
    let mut out = BTreeMap::new();
    for a in s.atoms() {
        let k: Vec<i64> = a
            .frequency
            .iter()
            .map(|&w| {
                if w.fract() != 0.0 {
                    Err(Error::NonIntegerFrequency(w))
                } else {
                    Ok(w as i64)
                }
            })
            .collect::<Result<_>>()?;
        if a.is_constant() {
            *out.entry(k).or_insert(Complex64::new(0.0, 0.0)) += a.amplitude * a.phase.cos();
        } else {
            let half = Complex64::from_polar(0.5 * a.amplitude, a.phase);
            let neg: Vec<i64> = k.iter().map(|v| -v).collect();
            *out.entry(k).or_insert(Complex64::new(0.0, 0.0)) += half;
            *out.entry(neg).or_insert(Complex64::new(0.0, 0.0)) += half.conj();
        }
    }
    Ok(out)
}

struct FrequencyBox {
    dim: usize,
    k: i64,
    side: usize,
    len: usize,
}

impl FrequencyBox {
    fn new(dim: usize, k: usize) -> Self {
        let side = 2 * k + 1;
        Self {
            dim,
            k: k as i64,
            side,
            len: side.pow(dim as u32),
        }
    }

    fn multi_index(&self, mut idx: usize) -> Vec<i64> {
        (0..self.dim)
            .map(|_| {
                let v = (idx % self.side) as i64 - self.k;
                idx /= self.side;
                v
            })
            .collect()
    }

    fn linear_index(&self, m: &[i64]) -> Option<usize> {
        let mut idx = 0;
        let mut stride = 1;
        for &v in m {
            if v.abs() > self.k {
                return None;
            }
            idx += (v + self.k) as usize * stride;
            stride *= self.side;
        }
        Some(idx)
    }
}

struct SparseHermitian {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    diag: Vec<f64>,
}

impl SparseHermitian {
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in self.row_start[r]..self.row_start[r + 1] {
                acc += self.vals[e] * x[self.cols[e]];
            }
            *out = acc;
        });
    }
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Solves the truncated Galerkin system for `‖k‖_∞ ≤ K`.
pub fn galerkin_solve(p: &EllipticProblem, truncation: usize) -> Result<GalerkinSolution> {
    if !p.is_torus() {
        return Err(Error::NotTorus);
    }
    let d = p.dim();
    let fmax = p.f().max_abs_frequency();
    if fmax > truncation as f64 {
        return Err(Error::TruncationTooSmall {
            k: truncation,
            detail: format!("source frequency {fmax} lies outside the span"),
        });
    }
    let grid = FrequencyBox::new(d, truncation);

    // q ↦ (Â(q) row-major d×d, ĉ(q))
    let mut couplings: BTreeMap<Vec<i64>, (Vec<Complex64>, Complex64)> = BTreeMap::new();
    let zero = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            for (q, v) in exponential_coefficients(p.a(i, j))? {
                couplings
                    .entry(q)
                    .or_insert_with(|| (vec![zero; d * d], zero))
                    .0[i * d + j] += v;
            }
        }
    }
    for (q, v) in exponential_coefficients(p.c())? {
        couplings
            .entry(q)
            .or_insert_with(|| (vec![zero; d * d], zero))
            .1 += v;
    }
    let couplings: Vec<(Vec<i64>, Vec<Complex64>, Complex64)> =
        couplings.into_iter().map(|(q, (a, c))| (q, a, c)).collect();

    let rows: Vec<(Vec<usize>, Vec<Complex64>, f64)> = (0..grid.len)
        .into_par_iter()
        .map(|r| {
            let k = grid.multi_index(r);
            let mut cols = Vec::with_capacity(couplings.len());
            let mut vals = Vec::with_capacity(couplings.len());
            let mut diag = 0.0;
            for (q, a, c) in &couplings {
                let m: Vec<i64> = k.iter().zip(q).map(|(ki, qi)| ki - qi).collect();
                let Some(col) = grid.linear_index(&m) else {
                    continue;
                };
                let mut v = *c;
                for i in 0..d {
                    for j in 0..d {
                        v += a[i * d + j] * (k[i] * m[j]) as f64;
                    }
                }
                if col == r {
                    diag = v.re;
                }
                cols.push(col);
                vals.push(v);
            }
            (cols, vals, diag)
        })
        .collect();
    let mut matrix = SparseHermitian {
        row_start: Vec::with_capacity(grid.len + 1),
        cols: Vec::new(),
        vals: Vec::new(),
        diag: Vec::with_capacity(grid.len),
    };
    matrix.row_start.push(0);
    for (cols, vals, diag) in rows {
        if !(diag > 0.0) {
            return Err(Error::SingularSystem(format!(
                "nonpositive diagonal {diag}"
            )));
        }
        matrix.cols.extend(cols);
        matrix.vals.extend(vals);
        matrix.diag.push(diag);
        matrix.row_start.push(matrix.cols.len());
    }

    let mut rhs = vec![zero; grid.len];
    for (k, v) in exponential_coefficients(p.f())? {
        let idx = grid
            .linear_index(&k)
            .expect("source checked against truncation");
        rhs[idx] += v;
    }
    let (solution, iterations) = pcg(&matrix, &rhs)?;

    let mut r = vec![zero; grid.len];
    matrix.apply(&solution, &mut r);
    for (ri, bi) in r.iter_mut().zip(&rhs) {
        *ri -= bi;
    }
    let residual_l2 = norm(&r);
    let rhs_norm = norm(&rhs);
    let relative_residual = if rhs_norm > 0.0 {
        residual_l2 / rhs_norm
    } else {
        residual_l2
    };
    if relative_residual > ACCEPT_RESIDUAL {
        return Err(Error::SingularSystem(format!(
            "conjugate gradients stalled at relative residual {relative_residual:e}"
        )));
    }

    // Real field: û_{−k} = conj(û_k); average the pair to remove round-off.
    let mut coeffs = BTreeMap::new();
    for idx in 0..grid.len {
        let k = grid.multi_index(idx);
        let first = k.iter().find(|&&v| v != 0).copied();
        match first {
            None => {
                let v = solution[idx].re;
                if v != 0.0 {
                    coeffs.insert(k, (v, 0.0));
                }
            }
            Some(v) if v > 0 => {
                let neg: Vec<i64> = k.iter().map(|x| -x).collect();
                let partner = solution[grid.linear_index(&neg).expect("box is symmetric")];
                let uk = 0.5 * (solution[idx] + partner.conj());
                if uk.re != 0.0 || uk.im != 0.0 {
                    // û e^{ik·x} + conj(û) e^{−ik·x} = 2Re(û) cos(k·x) − 2Im(û) sin(k·x)
                    coeffs.insert(k, (2.0 * uk.re, -2.0 * uk.im));
                }
            }
            Some(_) => {}
        }
    }
    Ok(GalerkinSolution {
        field: SpectralField::from_coefficients(d, truncation, coeffs),
        relative_residual,
        residual_l2,
        iterations,
        unknowns: grid.len,
    })
}

fn pcg(m: &SparseHermitian, b: &[Complex64]) -> Result<(Vec<Complex64>, usize)> {
    let n = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut x = vec![zero; n];
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<Complex64> = r.iter().zip(&m.diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z).re;
    let mut ap = vec![zero; n];
    let max_iter = 20 * n + 1000;
    for it in 1..=max_iter {
        m.apply(&p, &mut ap);
        let pap = dot(&p, &ap).re;
        if !(pap > 0.0) {
            return Err(Error::SingularSystem(format!(
                "p·Ap = {pap} at iteration {it}"
            )));
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        if norm(&r) <= CG_TOL * b_norm {
            return Ok((x, it));
        }
        for i in 0..n {
            z[i] = r[i] / m.diag[i];
        }
        let rz_new = dot(&r, &z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Ok((x, max_iter))
}
