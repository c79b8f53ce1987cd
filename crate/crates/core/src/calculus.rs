//! Closed algebra of cosine atoms: products, derivatives, the elliptic
//! operator in non-divergence form and the screened-Poisson preconditioner.
//!
//! All identities are exact at the atom level:
//!
//! ```text
//! cos y₁ cos y₂ = ½ cos(y₁ + y₂) + ½ cos(y₁ − y₂)
//! ∂ᵢ a cos(w·x + b)  = a wᵢ cos(w·x + b + π/2)
//! ∂ᵢⱼ a cos(w·x + b) = a wᵢ wⱼ cos(w·x + b + π)
//! (I − Δ)⁻¹ a cos(w·x + b) = a / (1 + ‖w‖²) cos(w·x + b)
//! ```

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::atoms::{canonicalize, Atom, AtomSum};
use crate::error::{Error, Result};
use crate::problem::EllipticProblem;

fn check_pair(s1: &AtomSum, s2: &AtomSum) -> Result<()> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            found: s2.dim(),
        });
    }
    if s1.is_torus() != s2.is_torus() {
        return Err(Error::ModeMismatch);
    }
    Ok(())
}

fn check_axis(s: &AtomSum, axis: usize) -> Result<()> {
    if axis >= s.dim() {
        return Err(Error::AxisOutOfRange { axis, dim: s.dim() });
    }
    Ok(())
}

/// Every pairwise expansion of `s1 × s2`, before merging.
fn product_atoms(s1: &AtomSum, s2: &AtomSum, out: &mut Vec<Atom>) {
    out.reserve(2 * s1.len() * s2.len());
    for p in s1.atoms() {
        for q in s2.atoms() {
            let half = 0.5 * p.amplitude * q.amplitude;
            let sum: Vec<f64> = p
                .frequency
                .iter()
                .zip(&q.frequency)
                .map(|(a, b)| a + b)
                .collect();
            let diff: Vec<f64> = p
                .frequency
                .iter()
                .zip(&q.frequency)
                .map(|(a, b)| a - b)
                .collect();
            out.push(Atom::new(half, sum, p.phase + q.phase));
            out.push(Atom::new(half, diff, p.phase - q.phase));
        }
    }
}

/// Pointwise product. Before merging the tracked norm is exactly the product
/// of the input norms; merging can only lower it.
pub fn product(s1: &AtomSum, s2: &AtomSum) -> Result<AtomSum> {
    check_pair(s1, s2)?;
    let mut atoms = Vec::new();
    product_atoms(s1, s2, &mut atoms);
    canonicalize(s1.dim(), s1.is_torus(), atoms)
}

fn derivative_atoms(s: &AtomSum, i: usize) -> impl Iterator<Item = Atom> + '_ {
    s.atoms()
        .iter()
        .filter(move |a| a.frequency[i] != 0.0)
        .map(move |a| {
            Atom::new(
                a.amplitude * a.frequency[i],
                a.frequency.clone(),
                a.phase + FRAC_PI_2,
            )
        })
}

fn second_derivative_atoms(s: &AtomSum, i: usize, j: usize) -> impl Iterator<Item = Atom> + '_ {
    s.atoms()
        .iter()
        .filter(move |a| a.frequency[i] != 0.0 && a.frequency[j] != 0.0)
        .map(move |a| {
            Atom::new(
                a.amplitude * (a.frequency[i] * a.frequency[j]),
                a.frequency.clone(),
                a.phase + PI,
            )
        })
}

/// `∂ᵢ s` for a zero-based axis `i`.
pub fn partial_derivative(s: &AtomSum, i: usize) -> Result<AtomSum> {
    check_axis(s, i)?;
    canonicalize(s.dim(), s.is_torus(), derivative_atoms(s, i).collect())
}

/// `∂ᵢ∂ⱼ s` for zero-based axes.
pub fn second_derivative(s: &AtomSum, i: usize, j: usize) -> Result<AtomSum> {
    check_axis(s, i)?;
    check_axis(s, j)?;
    canonicalize(
        s.dim(),
        s.is_torus(),
        second_derivative_atoms(s, i, j).collect(),
    )
}

/// `Lu = −Σᵢⱼ (∂ᵢAᵢⱼ ∂ⱼu + Aᵢⱼ ∂ᵢⱼu) + cu`, expanded atom by atom and merged
/// once at the end.
pub fn apply_elliptic(p: &EllipticProblem, u: &AtomSum) -> Result<AtomSum> {
    if u.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: u.dim(),
        });
    }
    if u.is_torus() != p.is_torus() {
        return Err(Error::ModeMismatch);
    }
    let d = p.dim();
    let torus = u.is_torus();
    let mut atoms = Vec::new();
    if u.is_empty() {
        return Ok(AtomSum::zero(d, torus));
    }
    let du: Vec<AtomSum> = (0..d)
        .map(|j| AtomSum::from_canonical(d, torus, derivative_atoms(u, j).collect()))
        .collect();
    for i in 0..d {
        for j in 0..d {
            let aij = p.a(i, j);
            if aij.is_empty() {
                continue;
            }
            let dai = AtomSum::from_canonical(d, torus, derivative_atoms(aij, i).collect());
            product_atoms(&dai, &du[j], &mut atoms);
            let duij =
                AtomSum::from_canonical(d, torus, second_derivative_atoms(u, i, j).collect());
            product_atoms(aij, &duij, &mut atoms);
        }
    }
    for a in atoms.iter_mut() {
        a.amplitude = -a.amplitude;
    }
    product_atoms(p.c(), u, &mut atoms);
    canonicalize(d, torus, atoms)
}

/// `(I − Δ)⁻¹ s`: each amplitude is divided by `1 + ‖w‖²`.
pub fn precondition(s: &AtomSum) -> AtomSum {
    let atoms = s
        .atoms()
        .iter()
        .map(|a| {
            Atom::new(
                a.amplitude / (1.0 + a.frequency_norm_sq()),
                a.frequency.clone(),
                a.phase,
            )
        })
        .collect();
    AtomSum::from_canonical(s.dim(), s.is_torus(), atoms)
}

/// `(I − Δ) s`, the atomwise inverse of [`precondition`].
pub fn screened_laplacian(s: &AtomSum) -> AtomSum {
    let atoms = s
        .atoms()
        .iter()
        .map(|a| {
            Atom::new(
                a.amplitude * (1.0 + a.frequency_norm_sq()),
                a.frequency.clone(),
                a.phase,
            )
        })
        .collect();
    AtomSum::from_canonical(s.dim(), s.is_torus(), atoms)
}

/// One support point of a [`RebalancedMeasure`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAtom {
    pub probability: f64,
    pub sign: f64,
    pub frequency: Vec<f64>,
    pub phase: f64,
}

/// Equal-mass representation `Σ pᵢ (±ℓ) cos(wᵢ·x + bᵢ)` of an atom sum,
/// with `pᵢ = |aᵢ|/ℓ` and `ℓ` the tracked norm.
#[derive(Debug, Clone, PartialEq)]
pub struct RebalancedMeasure {
    pub dim: usize,
    pub torus: bool,
    pub total_mass: f64,
    pub atoms: Vec<WeightedAtom>,
}

impl RebalancedMeasure {
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.atoms
            .iter()
            .map(|a| {
                let arg: f64 =
                    a.frequency.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + a.phase;
                a.probability * a.sign * self.total_mass * arg.cos()
            })
            .sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.probability).collect()
    }
}

pub fn rebalance(s: &AtomSum) -> Result<RebalancedMeasure> {
    let total = s.tracked_norm();
    if !(total > 0.0) {
        return Err(Error::ZeroSum);
    }
    let atoms = s
        .atoms()
        .iter()
        .map(|a| WeightedAtom {
            probability: a.amplitude.abs() / total,
            sign: a.amplitude.signum(),
            frequency: a.frequency.clone(),
            phase: a.phase,
        })
        .collect();
    Ok(RebalancedMeasure {
        dim: s.dim(),
        torus: s.is_torus(),
        total_mass: total,
        atoms,
    })
}

/// Builds `f(x) = Σ_k Re(c_k e^{ik·x})` plus the implied conjugate partners.
///
/// Each entry stands for a `±k` pair: it contributes `2|c_k| cos(k·x + arg c_k)`,
/// and the zero mode contributes `Re c₀`. Supplying both `k` and `−k` is an
/// error.
pub fn from_fourier_data(
    coeffs: &[(Vec<f64>, Complex64)],
    dim: usize,
    torus: bool,
) -> Result<AtomSum> {
    let mut keys: Vec<Vec<f64>> = Vec::with_capacity(coeffs.len());
    let mut atoms = Vec::with_capacity(coeffs.len());
    for (k, c) in coeffs {
        if k.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: k.len(),
            });
        }
        if torus {
            if let Some(&w) = k.iter().find(|w| w.fract() != 0.0) {
                return Err(Error::NonIntegerFrequency(w));
            }
        }
        let mut key: Vec<f64> = k.iter().map(|&w| if w == 0.0 { 0.0 } else { w }).collect();
        if key.iter().find(|&&w| w != 0.0).is_some_and(|&w| w < 0.0) {
            key.iter_mut().for_each(|w| *w = -*w);
        }
        if keys.contains(&key) {
            return Err(Error::DuplicateFrequency(key));
        }
        keys.push(key);
        if k.iter().all(|&w| w == 0.0) {
            atoms.push(Atom::constant(dim, c.re));
        } else {
            atoms.push(Atom::new(2.0 * c.norm(), k.clone(), c.arg()));
        }
    }
    canonicalize(dim, torus, atoms)
}

/// Parses Fourier input lines `k_1 … k_d re im`.
pub fn parse_fourier_lines(
    text: &str,
    dim: usize,
    first_line: usize,
) -> Result<Vec<(Vec<f64>, Complex64)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + first_line;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let values: Vec<f64> = l
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line,
                detail: format!("bad number in Fourier line `{l}`: {e}"),
            })?;
        if values.len() != dim + 2 {
            return Err(Error::Parse {
                line,
                detail: format!(
                    "Fourier line needs {} numbers, found {}",
                    dim + 2,
                    values.len()
                ),
            });
        }
        out.push((
            values[..dim].to_vec(),
            Complex64::new(values[dim], values[dim + 1]),
        ));
    }
    Ok(out)
}

/// Constants of the general (activation-agnostic) growth bound.
///
/// `l_*` are norm constants and `r_*` radius constants. The multiplication
/// and derivative constants (`l_m`, `l_d1`, `l_d2`, `r_m`, `r_d1`, `r_d2`)
/// belong to the activation and must be positive; the problem constants
/// (`l_a`, `l_c`, `l_f`, `r_a`, `r_c`, `r_f`) may be zero, as for constant
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormConstants {
    pub l_m: f64,
    pub l_a: f64,
    pub l_c: f64,
    pub l_f: f64,
    pub l_d1: f64,
    pub l_d2: f64,
    pub r_a: f64,
    pub r_c: f64,
    pub r_f: f64,
    pub r_m: f64,
    pub r_d1: f64,
    pub r_d2: f64,
}

impl NormConstants {
    /// Cosine activation constants combined with the problem's norms and radii.
    pub fn cosine(p: &EllipticProblem) -> Self {
        Self {
            l_m: 1.0,
            l_a: p.l_a(),
            l_c: p.l_c(),
            l_f: p.l_f(),
            l_d1: 1.0,
            l_d2: 1.0,
            r_a: p.r_a(),
            r_c: p.r_c(),
            r_f: p.r_f(),
            r_m: 1.0,
            r_d1: 1.0,
            r_d2: 1.0,
        }
    }

    /// Parses `key=value` pairs separated by whitespace or commas. Every key
    /// (`l_m l_A l_c l_f l_d1 l_d2 R_A R_c R_f R_m R_d1 R_d2`) is required.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut slots: [Option<f64>; 12] = [None; 12];
        const KEYS: [&str; 12] = [
            "l_m", "l_a", "l_c", "l_f", "l_d1", "l_d2", "r_a", "r_c", "r_f", "r_m", "r_d1", "r_d2",
        ];
        for field in text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
        {
            let (k, v) = field.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("expected key=value, got `{field}`"))
            })?;
            let idx = KEYS
                .iter()
                .position(|key| key.eq_ignore_ascii_case(k.trim()))
                .ok_or_else(|| Error::InvalidArgument(format!("unknown constant `{k}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|e| Error::InvalidArgument(format!("bad value for `{k}`: {e}")))?;
            slots[idx] = Some(v);
        }
        let get = |i: usize| {
            slots[i]
                .ok_or_else(|| Error::InvalidArgument(format!("missing constant `{}`", KEYS[i])))
        };
        Ok(Self {
            l_m: get(0)?,
            l_a: get(1)?,
            l_c: get(2)?,
            l_f: get(3)?,
            l_d1: get(4)?,
            l_d2: get(5)?,
            r_a: get(6)?,
            r_c: get(7)?,
            r_f: get(8)?,
            r_m: get(9)?,
            r_d1: get(10)?,
            r_d2: get(11)?,
        })
    }

    fn validate(&self) -> Result<()> {
        let activation = [
            self.l_m, self.l_d1, self.l_d2, self.r_m, self.r_d1, self.r_d2,
        ];
        let problem = [self.l_a, self.l_c, self.l_f, self.r_a, self.r_c, self.r_f];
        if activation.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(
                "activation constants must be positive and finite".into(),
            ));
        }
        if problem.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(
                "problem constants must be non-negative and finite".into(),
            ));
        }
        Ok(())
    }
}

/// One step of the general growth recursion: returns the bound on the next
/// iterate's Barron norm and the smallest admissible next radius.
pub fn general_norm_bound(
    k: &NormConstants,
    alpha: f64,
    dim: usize,
    norm_t: f64,
    radius_t: f64,
) -> Result<(f64, f64)> {
    k.validate()?;
    if !(alpha >= 0.0 && alpha.is_finite()) || !(norm_t >= 0.0) || !(radius_t >= 0.0) || dim == 0 {
        return Err(Error::InvalidArgument(
            "alpha, norm and radius must be non-negative and d positive".into(),
        ));
    }
    let d2 = (dim * dim) as f64;
    let factor = alpha
        * k.l_m
        * k.l_a
        * (k.l_d1 * k.l_d1 * k.r_a * radius_t + k.l_d2 * radius_t * radius_t)
        * d2
        + alpha * k.l_m * k.l_c
        + 1.0;
    let norm = factor * norm_t + alpha * k.l_f;
    let radius = [
        k.r_m * k.r_d1 * (radius_t + k.r_a),
        k.r_m * (k.r_d2 * radius_t + k.r_a),
        k.r_m * (radius_t + k.r_c),
        radius_t,
        k.r_f,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok((norm, radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{random_points, random_sum};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sum(dim: usize, atoms: &[(f64, &[f64], f64)]) -> AtomSum {
        AtomSum::new(
            dim,
            true,
            atoms
                .iter()
                .map(|(a, w, b)| Atom::new(*a, w.to_vec(), *b))
                .collect(),
        )
        .unwrap()
    }

    fn assert_close_sums(s1: &AtomSum, s2: &AtomSum, tol: f64) {
        assert_eq!(s1.len(), s2.len(), "{s1:?} vs {s2:?}");
        for (a, b) in s1.atoms().iter().zip(s2.atoms()) {
            assert_eq!(a.frequency, b.frequency);
            assert!((a.amplitude - b.amplitude).abs() <= tol * a.amplitude.abs().max(1.0));
            assert!((a.phase - b.phase).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn product_of_orthogonal_cosines() {
        let p = product(
            &sum(2, &[(1.0, &[1.0, 0.0], 0.0)]),
            &sum(2, &[(1.0, &[0.0, 1.0], 0.0)]),
        )
        .unwrap();
        assert_eq!(
            p,
            sum(2, &[(0.5, &[1.0, 1.0], 0.0), (0.5, &[1.0, -1.0], 0.0)])
        );
    }

    #[test]
    fn constant_times_atom() {
        let c = AtomSum::constant(2, true, 2.0);
        let s = sum(2, &[(1.0, &[1.0, 3.0], 0.7)]);
        assert_eq!(product(&c, &s).unwrap(), sum(2, &[(2.0, &[1.0, 3.0], 0.7)]));
        assert_eq!(product(&AtomSum::constant(2, true, 1.0), &s).unwrap(), s);
    }

    #[test]
    fn product_matches_pointwise_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let s1 = random_sum(&mut rng, 3, 5, 3, true);
        let s2 = random_sum(&mut rng, 3, 5, 3, true);
        let p = product(&s1, &s2).unwrap();
        assert!(p.tracked_norm() <= s1.tracked_norm() * s2.tracked_norm() * (1.0 + 1e-15));
        assert!(p.support_radius() <= s1.support_radius() + s2.support_radius() + 1e-12);
        for x in random_points(&mut rng, 3, 1000) {
            let expect = s1.value_at(&x) * s2.value_at(&x);
            assert!((p.value_at(&x) - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn product_is_commutative_atom_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let s1 = random_sum(&mut rng, 2, 8, 3, true);
        let s2 = random_sum(&mut rng, 2, 8, 3, true);
        assert_eq!(product(&s1, &s2).unwrap(), product(&s2, &s1).unwrap());
    }

    #[test]
    fn derivative_examples() {
        let s = sum(2, &[(3.0, &[2.0, 0.0], 0.5)]);
        let d1 = partial_derivative(&s, 0).unwrap();
        assert_eq!(
            d1.atoms(),
            &[Atom::new(6.0, vec![2.0, 0.0], 0.5 + FRAC_PI_2)]
        );
        assert!(partial_derivative(&s, 1).unwrap().is_empty());
        assert!(matches!(
            partial_derivative(&s, 2),
            Err(Error::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn derivative_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let s = random_sum(&mut rng, 3, 10, 3, true);
        let h = 1e-5;
        for i in 0..3 {
            let ds = partial_derivative(&s, i).unwrap();
            assert!(ds.tracked_norm() <= s.support_radius() * s.tracked_norm());
            for x in random_points(&mut rng, 3, 200) {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[i] += h;
                xm[i] -= h;
                let fd = (s.value_at(&xp) - s.value_at(&xm)) / (2.0 * h);
                let exact = ds.value_at(&x);
                assert!(
                    (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                    "{fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn second_derivative_examples() {
        let s = sum(2, &[(1.0, &[1.0, 0.0], 0.0)]);
        assert_eq!(
            second_derivative(&s, 0, 0).unwrap().atoms(),
            &[Atom::new(1.0, vec![1.0, 0.0], PI)]
        );
        assert!(second_derivative(&s, 0, 1).unwrap().is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let r = random_sum(&mut rng, 3, 12, 3, true);
        for i in 0..3 {
            for j in 0..3 {
                let direct = second_derivative(&r, i, j).unwrap();
                let twice = partial_derivative(&partial_derivative(&r, j).unwrap(), i).unwrap();
                assert_close_sums(&direct, &twice, 1e-12);
                let swapped = second_derivative(&r, j, i).unwrap();
                assert_close_sums(&direct, &swapped, 1e-12);
                let rr = r.support_radius();
                assert!(direct.tracked_norm() <= rr * rr * r.tracked_norm());
            }
        }
    }

    #[test]
    fn elliptic_operator_constant_coefficients() {
        let p = crate::fixtures::identity_problem(2);
        let u = sum(2, &[(1.0, &[1.0, 0.0], 0.0)]);
        assert_eq!(
            apply_elliptic(&p, &u).unwrap(),
            sum(2, &[(2.0, &[1.0, 0.0], 0.0)])
        );
        assert!(apply_elliptic(&p, &AtomSum::zero(2, true))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn elliptic_operator_matches_finite_differences_1d() {
        let p = crate::fixtures::benchmark_1d();
        let u = sum(1, &[(1.0, &[1.0], 0.0)]);
        let lu = apply_elliptic(&p, &u).unwrap();
        assert!(lu.support_radius() <= u.support_radius() + p.r_a().max(p.r_c()));
        let a = |x: f64| 2.0 + x.cos();
        let uf = |x: f64| x.cos();
        let h = 1e-4;
        // −(A u′)′ + u through nested central differences of the flux.
        let flux = |x: f64| a(x) * (uf(x + h) - uf(x - h)) / (2.0 * h);
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for x in random_points(&mut rng, 1, 500) {
            let x = x[0];
            let fd = -(flux(x + h) - flux(x - h)) / (2.0 * h) + uf(x);
            let exact = lu.value_at(&[x]);
            assert!(
                (fd - exact).abs() <= 1e-5 * exact.abs().max(1.0),
                "{fd} vs {exact}"
            );
        }
    }

    #[test]
    fn precondition_examples() {
        let s = sum(3, &[(4.0, &[1.0, 1.0, 1.0], 0.2)]);
        assert_eq!(precondition(&s), sum(3, &[(1.0, &[1.0, 1.0, 1.0], 0.2)]));
        let c = AtomSum::constant(3, true, 2.5);
        assert_eq!(precondition(&c), c);
    }

    #[test]
    fn precondition_is_inverted_by_screened_laplacian() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let s = random_sum(&mut rng, 2, 20, 4, true);
        let ps = precondition(&s);
        assert!(ps.tracked_norm() <= s.tracked_norm());
        // (I − Δ) assembled from second derivatives.
        let mut back = ps.clone();
        for i in 0..2 {
            back = back.sub(&second_derivative(&ps, i, i).unwrap()).unwrap();
        }
        assert!(
            back.sub(&s).unwrap().h1_norm_torus().unwrap() <= 1e-12 * s.h1_norm_torus().unwrap()
        );
        assert_close_sums(&screened_laplacian(&ps), &s, 1e-14);
    }

    #[test]
    fn rebalance_examples() {
        let s = sum(1, &[(3.0, &[1.0], 0.1), (-1.0, &[2.0], 0.2)]);
        let m = rebalance(&s).unwrap();
        assert_eq!(m.total_mass, 4.0);
        assert_eq!(m.probabilities(), vec![0.75, 0.25]);
        assert_eq!(m.atoms[0].sign, 1.0);
        assert_eq!(m.atoms[1].sign, -1.0);
        let single = rebalance(&sum(2, &[(2.0, &[1.0, 1.0], 0.0)])).unwrap();
        assert_eq!(single.total_mass, 2.0);
        assert_eq!(single.probabilities(), vec![1.0]);
        assert!(matches!(
            rebalance(&AtomSum::zero(1, true)),
            Err(Error::ZeroSum)
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let r = random_sum(&mut rng, 3, 15, 3, true);
        let m = rebalance(&r).unwrap();
        assert!((m.probabilities().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for x in random_points(&mut rng, 3, 100) {
            assert!((m.value_at(&x) - r.value_at(&x)).abs() <= 1e-13 * r.tracked_norm());
        }
    }

    #[test]
    fn fourier_ingestion() {
        let c = |re, im| Complex64::new(re, im);
        let s = from_fourier_data(&[(vec![1.0, 0.0], c(0.5, 0.0))], 2, true).unwrap();
        assert_eq!(s, sum(2, &[(1.0, &[1.0, 0.0], 0.0)]));
        let s = from_fourier_data(&[(vec![1.0, 0.0], c(0.0, 0.5))], 2, true).unwrap();
        assert_eq!(s, sum(2, &[(1.0, &[1.0, 0.0], FRAC_PI_2)]));
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for x in random_points(&mut rng, 2, 50) {
            assert!((s.value_at(&x) + x[0].sin()).abs() < 1e-14);
        }
        let s = from_fourier_data(&[(vec![0.0, 0.0], c(2.0, 0.0))], 2, true).unwrap();
        assert_eq!(s, AtomSum::constant(2, true, 2.0));

        let data = [
            (vec![1.0, -2.0], c(0.3, -0.4)),
            (vec![0.0, 0.0], c(-1.0, 0.0)),
        ];
        let s = from_fourier_data(&data, 2, true).unwrap();
        assert!((s.tracked_norm() - (2.0 * 0.5 + 1.0)).abs() < 1e-15);
        for x in random_points(&mut rng, 2, 50) {
            let direct: f64 = data
                .iter()
                .map(|(k, ck)| {
                    let e = Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1]);
                    let z = ck * e;
                    if k.iter().all(|&w| w == 0.0) {
                        z.re
                    } else {
                        2.0 * z.re
                    }
                })
                .sum();
            assert!((s.value_at(&x) - direct).abs() < 1e-13);
        }

        let dup = [
            (vec![1.0, 0.0], c(1.0, 0.0)),
            (vec![-1.0, 0.0], c(1.0, 0.0)),
        ];
        assert!(matches!(
            from_fourier_data(&dup, 2, true),
            Err(Error::DuplicateFrequency(_))
        ));
        let frac = [(vec![0.5, 0.0], c(1.0, 0.0))];
        assert!(matches!(
            from_fourier_data(&frac, 2, true),
            Err(Error::NonIntegerFrequency(_))
        ));
    }

    #[test]
    fn fourier_lines_parse() {
        let parsed = parse_fourier_lines("# comment\n1 0 0.5 0\n0 0 2 0\n", 2, 1).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].1, Complex64::new(0.5, 0.0));
        assert!(matches!(
            parse_fourier_lines("1 0 0.5\n", 2, 10),
            Err(Error::Parse { line: 10, .. })
        ));
    }

    fn unit_constants() -> NormConstants {
        NormConstants::from_key_values(
            "l_m=1 l_A=1 l_c=1 l_f=1 l_d1=1 l_d2=1 R_A=1 R_c=1 R_f=1 R_m=1 R_d1=1 R_d2=1",
        )
        .unwrap()
    }

    #[test]
    fn general_bound_direct_substitution() {
        let k = unit_constants();
        let (norm, radius) = general_norm_bound(&k, 1.0, 1, 1.0, 1.0).unwrap();
        assert_eq!(norm, 5.0);
        assert_eq!(radius, 2.0);
        let (frozen, _) = general_norm_bound(&k, 0.0, 3, 2.5, 1.0).unwrap();
        assert_eq!(frozen, 2.5);
        let bad = NormConstants { l_m: 0.0, ..k };
        assert!(general_norm_bound(&bad, 1.0, 1, 1.0, 1.0).is_err());
        assert!(NormConstants::from_key_values("l_m=1").is_err());
        assert!(NormConstants::from_key_values("bogus=1").is_err());
    }
}
