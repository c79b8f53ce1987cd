//! Independent ground truth on the torus `[0, 2π)^d`.
//!
//! Results from this module are torus benchmarks: the reference solutions
//! are periodic restatements of the whole-space problem, not whole-space
//! solutions.

mod fft;
mod galerkin;
mod green;
mod probe;

use std::collections::BTreeMap;

pub use fft::fft_precondition_check;
pub use galerkin::{default_truncation, galerkin_solve, GalerkinSolution};
pub use green::green1d_check;
pub use probe::{ellipticity_probe, ProbeEstimates};

use crate::atoms::{cos_sin, Atom, AtomSum};
use crate::error::{Error, Result};

/// Cosine/sine amplitudes `u = Σ_k α_k cos(k·x) + β_k sin(k·x)` over integer
/// frequencies in the canonical half-space with `‖k‖_∞ ≤ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    dim: usize,
    truncation: usize,
    coeffs: BTreeMap<Vec<i64>, (f64, f64)>,
}

fn integer_frequency(a: &Atom) -> Result<Vec<i64>> {
    a.frequency
        .iter()
        .map(|&w| {
            if w.fract() != 0.0 {
                Err(Error::NonIntegerFrequency(w))
            } else {
                Ok(w as i64)
            }
        })
        .collect()
}

fn cos_sin_pair(a: &Atom) -> (f64, f64) {
    // a cos(k·x + b) = a cos b cos(k·x) − a sin b sin(k·x)
    let (c, s) = cos_sin(a.phase);
    if a.is_constant() {
        (a.amplitude * c, 0.0)
    } else {
        (a.amplitude * c, -a.amplitude * s)
    }
}

fn mode_weight(k: &[i64]) -> f64 {
    if k.iter().all(|&v| v == 0) {
        1.0
    } else {
        0.5
    }
}

fn norm_sq(k: &[i64]) -> f64 {
    k.iter().map(|&v| (v * v) as f64).sum()
}

impl SpectralField {
    pub(crate) fn from_coefficients(
        dim: usize,
        truncation: usize,
        coeffs: BTreeMap<Vec<i64>, (f64, f64)>,
    ) -> Self {
        Self {
            dim,
            truncation,
            coeffs,
        }
    }

    pub fn from_atom_sum(s: &AtomSum, truncation: usize) -> Result<Self> {
        if !s.is_torus() {
            return Err(Error::NotTorus);
        }
        let mut coeffs = BTreeMap::new();
        for a in s.atoms() {
            let k = integer_frequency(a)?;
            if k.iter().any(|v| v.unsigned_abs() as usize > truncation) {
                return Err(Error::TruncationTooSmall {
                    k: truncation,
                    detail: format!("frequency {k:?} lies outside the truncation"),
                });
            }
            coeffs.insert(k, cos_sin_pair(a));
        }
        Ok(Self {
            dim: s.dim(),
            truncation,
            coeffs,
        })
    }

    pub fn to_atom_sum(&self) -> AtomSum {
        let atoms = self
            .coeffs
            .iter()
            .map(|(k, &(c, s))| {
                let w = k.iter().map(|&v| v as f64).collect();
                Atom::new(c.hypot(s), w, (-s).atan2(c))
            })
            .collect();
        AtomSum::new(self.dim, true, atoms).expect("integer frequencies of matching dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn coefficients(&self) -> &BTreeMap<Vec<i64>, (f64, f64)> {
        &self.coeffs
    }

    pub fn h1_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, &(c, s))| (1.0 + norm_sq(k)) * mode_weight(k) * (c * c + s * s))
            .fold(0.0, |acc, v| acc + v)
            .sqrt()
    }

    /// Serializes through the atom-sum text block.
    pub fn to_text(&self) -> String {
        self.to_atom_sum().to_text()
    }

    /// Largest absolute sine amplitude, zero for even fields.
    pub fn max_sine_amplitude(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, &(_, s)| m.max(s.abs()))
    }
}

/// Exact H¹ distance between an integer-frequency atom sum and a reference
/// field; modes of `u` outside the truncation count in full.
pub fn h1_distance(u: &AtomSum, reference: &SpectralField) -> Result<f64> {
    if u.dim() != reference.dim {
        return Err(Error::DimensionMismatch {
            expected: reference.dim,
            found: u.dim(),
        });
    }
    if !u.is_torus() {
        return Err(Error::NotTorus);
    }
    let mut diff = reference.coeffs.clone();
    for a in u.atoms() {
        let k = integer_frequency(a)?;
        let (c, s) = cos_sin_pair(a);
        let e = diff.entry(k).or_insert((0.0, 0.0));
        e.0 -= c;
        e.1 -= s;
    }
    Ok(diff
        .iter()
        .map(|(k, &(c, s))| (1.0 + norm_sq(k)) * mode_weight(k) * (c * c + s * s))
        .fold(0.0, |acc, v| acc + v)
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::random_sum;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_round_trip_and_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let s = random_sum(&mut rng, 2, 12, 4, true);
        let f = SpectralField::from_atom_sum(&s, 4).unwrap();
        assert!(h1_distance(&s, &f).unwrap() < 1e-15);
        assert!((f.h1_norm() - s.h1_norm_torus().unwrap()).abs() < 1e-13);
        let back = f.to_atom_sum();
        assert!(s.sub(&back).unwrap().h1_norm_torus().unwrap() < 1e-14);
        assert!(SpectralField::from_atom_sum(&s, 2).is_err());
    }

    #[test]
    fn single_mode_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let s = random_sum(&mut rng, 3, 8, 2, true);
        let f = SpectralField::from_atom_sum(&s, 2).unwrap();
        let eps = 1e-3;
        let k0 = vec![3.0, -1.0, 2.0];
        let bumped = s
            .add(&AtomSum::new(3, true, vec![Atom::new(eps, k0.clone(), 0.0)]).unwrap())
            .unwrap();
        let expect = eps * ((1.0 + 14.0) / 2.0f64).sqrt();
        assert!((h1_distance(&bumped, &f).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn distance_agrees_with_atom_norm_of_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let a = random_sum(&mut rng, 2, 15, 3, true);
        let b = random_sum(&mut rng, 2, 15, 5, true);
        let f = SpectralField::from_atom_sum(&b, 5).unwrap();
        let direct = a.sub(&b).unwrap().h1_norm_torus().unwrap();
        assert!((h1_distance(&a, &f).unwrap() - direct).abs() <= 1e-12 * direct.max(1.0));
        assert!(matches!(
            h1_distance(&AtomSum::zero(3, true), &f),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
