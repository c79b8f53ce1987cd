//! Finite sums of cosine ridge atoms `a cos(w·x + b)`.
//!
//! Every [`AtomSum`] is kept in canonical form: the first nonzero frequency
//! component is positive, phases live in `[0, 2π)`, constants carry phase 0,
//! atoms are sorted lexicographically by frequency and no frequency occurs
//! twice. The tracked norm `Σ|a|` and the support radius `max ‖w‖` are
//! recomputed whenever a new sum is built.
//!
//! Norms on the torus use the normalized measure `(2π)^{-d} dx`, so a
//! non-constant atom has squared L² norm `a²/2` and squared H¹ norm
//! `a²(1 + ‖w‖²)/2`.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Phases closer than this (modulo 2π) are treated as equal when merging.
pub const PHASE_TOL: f64 = 1e-12;

/// A single cosine ridge function `amplitude · cos(frequency · x + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub amplitude: f64,
    pub frequency: Vec<f64>,
    pub phase: f64,
}

impl Atom {
    pub fn new(amplitude: f64, frequency: Vec<f64>, phase: f64) -> Self {
        Self {
            amplitude,
            frequency,
            phase,
        }
    }

    /// The constant function `value` in dimension `dim`.
    pub fn constant(dim: usize, value: f64) -> Self {
        Self::new(value, vec![0.0; dim], 0.0)
    }

    pub fn dim(&self) -> usize {
        self.frequency.len()
    }

    pub fn frequency_norm(&self) -> f64 {
        self.frequency.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn frequency_norm_sq(&self) -> f64 {
        self.frequency.iter().map(|w| w * w).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.frequency.iter().all(|&w| w == 0.0)
    }

    #[inline]
    pub fn value_at(&self, x: &[f64]) -> f64 {
        let theta: f64 = self.frequency.iter().zip(x).map(|(w, xi)| w * xi).sum();
        let (cb, sb) = cos_sin(self.phase);
        self.amplitude * (theta.cos() * cb - theta.sin() * sb)
    }
}

/// Reduces a phase to `[0, 2π)`, snapping values within [`PHASE_TOL`] of a
/// quarter turn onto that quarter turn exactly.
pub fn reduce_phase(b: f64) -> f64 {
    let mut r = b.rem_euclid(TAU);
    if r >= TAU {
        r = 0.0;
    }
    let q = (r / FRAC_PI_2).round();
    if (r - q * FRAC_PI_2).abs() <= PHASE_TOL {
        let q = (q as i64).rem_euclid(4);
        return q as f64 * FRAC_PI_2;
    }
    r
}

/// `(cos b, sin b)` with exact values on quarter turns produced by
/// [`reduce_phase`].
pub fn cos_sin(b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else if b == FRAC_PI_2 {
        (0.0, 1.0)
    } else if b == 2.0 * FRAC_PI_2 {
        (-1.0, 0.0)
    } else if b == 3.0 * FRAC_PI_2 {
        (0.0, -1.0)
    } else {
        (b.cos(), b.sin())
    }
}

fn is_quarter_turn(r: f64) -> bool {
    (0..4).any(|q| r == q as f64 * FRAC_PI_2)
}

fn phases_equal(b1: f64, b2: f64) -> bool {
    let d = (b1 - b2).rem_euclid(TAU);
    d <= PHASE_TOL || TAU - d <= PHASE_TOL
}

fn cmp_frequency(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// A canonical finite sum of cosine atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSum {
    dim: usize,
    torus: bool,
    atoms: Vec<Atom>,
    tracked_norm: f64,
    support_radius: f64,
}

/// Brings an arbitrary atom list into canonical form.
///
/// Pointwise values are preserved; the tracked norm of the result never
/// exceeds `Σ|a|` of the input list.
pub fn canonicalize(dim: usize, torus: bool, atoms: Vec<Atom>) -> Result<AtomSum> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut staged = Vec::with_capacity(atoms.len());
    for mut atom in atoms {
        if atom.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: atom.dim(),
            });
        }
        if !atom.amplitude.is_finite() || !atom.phase.is_finite() {
            return Err(Error::NonFinite("atom"));
        }
        for w in atom.frequency.iter_mut() {
            if !w.is_finite() {
                return Err(Error::NonFinite("frequency"));
            }
            if torus && w.fract() != 0.0 {
                return Err(Error::NonIntegerFrequency(*w));
            }
        }
        if atom.amplitude == 0.0 {
            continue;
        }
        if atom.is_constant() {
            // cos is even, so ±b give bit-identical constants
            let r = reduce_phase(atom.phase);
            let c = if is_quarter_turn(r) {
                cos_sin(r).0
            } else {
                atom.phase.cos()
            };
            atom.amplitude *= c;
            atom.phase = 0.0;
            if atom.amplitude == 0.0 {
                continue;
            }
        } else {
            let first = atom.frequency.iter().find(|&&w| w != 0.0).copied();
            if first.is_some_and(|w| w < 0.0) {
                for w in atom.frequency.iter_mut() {
                    *w = -*w;
                }
                atom.phase = -atom.phase;
            }
            atom.phase = reduce_phase(atom.phase);
        }
        for w in atom.frequency.iter_mut() {
            if *w == 0.0 {
                *w = 0.0;
            }
        }
        staged.push(atom);
    }
    // Ties are broken by phase and amplitude so the merge order, and hence
    // the rounding, does not depend on the input order.
    staged.sort_by(|a, b| {
        cmp_frequency(&a.frequency, &b.frequency)
            .then(a.phase.total_cmp(&b.phase))
            .then(a.amplitude.total_cmp(&b.amplitude))
    });

    let mut merged: Vec<Atom> = Vec::with_capacity(staged.len());
    let mut start = 0;
    while start < staged.len() {
        let mut end = start + 1;
        while end < staged.len()
            && cmp_frequency(&staged[start].frequency, &staged[end].frequency) == Ordering::Equal
        {
            end += 1;
        }
        if let Some(atom) = merge_group(&staged[start..end]) {
            merged.push(atom);
        }
        start = end;
    }
    Ok(AtomSum::from_canonical(dim, torus, merged))
}

fn merge_group(group: &[Atom]) -> Option<Atom> {
    let head = &group[0];
    if group.len() == 1 {
        return Some(head.clone());
    }
    let b0 = head.phase;
    let amplitude;
    let phase;
    if group.iter().all(|a| phases_equal(a.phase, b0)) {
        amplitude = group.iter().map(|a| a.amplitude).sum::<f64>();
        phase = b0;
    } else if group
        .iter()
        .all(|a| phases_equal(a.phase, b0) || phases_equal(a.phase, b0 + PI))
    {
        amplitude = group
            .iter()
            .map(|a| {
                if phases_equal(a.phase, b0) {
                    a.amplitude
                } else {
                    -a.amplitude
                }
            })
            .sum::<f64>();
        phase = b0;
    } else {
        // a cos(θ + b) = a cos b cos θ − a sin b sin θ
        let (mut cc, mut ss) = (0.0, 0.0);
        for a in group {
            let (c, s) = cos_sin(a.phase);
            cc += a.amplitude * c;
            ss += a.amplitude * s;
        }
        amplitude = cc.hypot(ss);
        phase = reduce_phase(ss.atan2(cc));
    }
    if amplitude == 0.0 {
        return None;
    }
    Some(Atom::new(amplitude, head.frequency.clone(), phase))
}

impl AtomSum {
    pub(crate) fn from_canonical(dim: usize, torus: bool, atoms: Vec<Atom>) -> Self {
        let tracked_norm = atoms.iter().fold(0.0, |acc, a| acc + a.amplitude.abs());
        let support_radius = atoms.iter().map(Atom::frequency_norm).fold(0.0, f64::max);
        Self {
            dim,
            torus,
            atoms,
            tracked_norm,
            support_radius,
        }
    }

    pub fn new(dim: usize, torus: bool, atoms: Vec<Atom>) -> Result<Self> {
        canonicalize(dim, torus, atoms)
    }

    /// The zero function.
    pub fn zero(dim: usize, torus: bool) -> Self {
        Self::from_canonical(dim, torus, Vec::new())
    }

    pub fn constant(dim: usize, torus: bool, value: f64) -> Self {
        if value == 0.0 {
            return Self::zero(dim, torus);
        }
        Self::from_canonical(dim, torus, vec![Atom::constant(dim, value)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_torus(&self) -> bool {
        self.torus
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `Σ|a|` over the canonical atoms; an upper bound on the Barron norm.
    pub fn tracked_norm(&self) -> f64 {
        self.tracked_norm
    }

    /// Largest Euclidean frequency norm, 0 for the empty sum.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Largest absolute frequency component over all atoms and axes.
    pub fn max_abs_frequency(&self) -> f64 {
        self.atoms
            .iter()
            .flat_map(|a| a.frequency.iter())
            .fold(0.0, |m, w| m.max(w.abs()))
    }

    fn check_compatible(&self, other: &AtomSum) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.torus != other.torus {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &AtomSum) -> Result<AtomSum> {
        self.check_compatible(other)?;
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        canonicalize(self.dim, self.torus, atoms)
    }

    pub fn sub(&self, other: &AtomSum) -> Result<AtomSum> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, lambda: f64) -> AtomSum {
        if lambda == 0.0 {
            return Self::zero(self.dim, self.torus);
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(lambda * a.amplitude, a.frequency.clone(), a.phase))
            .collect();
        Self::from_canonical(self.dim, self.torus, atoms)
    }

    /// Removes every atom with `|a| < threshold`; returns the pruned sum and
    /// the removed mass `Σ|a|`, which bounds the sup-norm change.
    pub fn prune(&self, threshold: f64) -> Result<(AtomSum, f64)> {
        if !(threshold >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "prune threshold must be non-negative, got {threshold}"
            )));
        }
        let mut dropped = 0.0;
        let kept = self
            .atoms
            .iter()
            .filter(|a| {
                let keep = a.amplitude.abs() >= threshold;
                if !keep {
                    dropped += a.amplitude.abs();
                }
                keep
            })
            .cloned()
            .collect();
        Ok((Self::from_canonical(self.dim, self.torus, kept), dropped))
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.atoms.iter().fold(0.0, |acc, a| acc + a.value_at(x))
    }

    pub fn evaluate(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        points
            .iter()
            .map(|x| {
                if x.len() != self.dim {
                    Err(Error::DimensionMismatch {
                        expected: self.dim,
                        found: x.len(),
                    })
                } else {
                    Ok(self.value_at(x))
                }
            })
            .collect()
    }

    fn require_torus(&self) -> Result<()> {
        if !self.torus {
            return Err(Error::NotTorus);
        }
        Ok(())
    }

    /// Exact H¹ norm on `[0, 2π)^d` under the normalized measure.
    pub fn h1_norm_torus(&self) -> Result<f64> {
        self.require_torus()?;
        Ok(self
            .atoms
            .iter()
            .map(|a| (1.0 + a.frequency_norm_sq()) * mode_weight(a) * a.amplitude * a.amplitude)
            .fold(0.0, |acc, v| acc + v)
            .sqrt())
    }

    /// Exact H⁻¹ norm on the torus, the dual of [`AtomSum::h1_norm_torus`].
    pub fn h_minus1_norm_torus(&self) -> Result<f64> {
        self.require_torus()?;
        Ok(self
            .atoms
            .iter()
            .map(|a| mode_weight(a) * a.amplitude * a.amplitude / (1.0 + a.frequency_norm_sq()))
            .fold(0.0, |acc, v| acc + v)
            .sqrt())
    }

    pub fn l2_norm_torus(&self) -> Result<f64> {
        self.require_torus()?;
        Ok(self
            .atoms
            .iter()
            .map(|a| mode_weight(a) * a.amplitude * a.amplitude)
            .fold(0.0, |acc, v| acc + v)
            .sqrt())
    }

    /// Line-oriented text block: a header `atomsum d=<d> torus=<bool> n=<count>`
    /// followed by one `a w_1 … w_d b` line per atom.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "atomsum d={} torus={} n={}\n",
            self.dim,
            self.torus,
            self.atoms.len()
        );
        for a in &self.atoms {
            write_atom_line(&mut out, a);
        }
        out
    }

    /// Parses the block written by [`AtomSum::to_text`]. Line numbers in
    /// errors are offset by `first_line`.
    pub fn from_text(text: &str, first_line: usize) -> Result<AtomSum> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + first_line, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: first_line,
            detail: "missing atomsum header".into(),
        })?;
        let (dim, torus, count) = parse_header(header, hline)?;
        let mut atoms = Vec::with_capacity(count);
        for (line, l) in lines {
            atoms.push(parse_atom_line(l, dim, line)?);
        }
        if atoms.len() != count {
            return Err(Error::Parse {
                line: hline,
                detail: format!("header announces {count} atoms, found {}", atoms.len()),
            });
        }
        canonicalize(dim, torus, atoms).map_err(|e| Error::Parse {
            line: hline,
            detail: e.to_string(),
        })
    }
}

pub(crate) fn mode_weight(a: &Atom) -> f64 {
    if a.is_constant() {
        1.0
    } else {
        0.5
    }
}

pub(crate) fn write_atom_line(out: &mut String, a: &Atom) {
    let _ = write!(out, "{:?}", a.amplitude);
    for w in &a.frequency {
        let _ = write!(out, " {w:?}");
    }
    let _ = writeln!(out, " {:?}", a.phase);
}

fn parse_header(header: &str, line: usize) -> Result<(usize, bool, usize)> {
    let err = |detail: String| Error::Parse { line, detail };
    let mut fields = header.split_whitespace();
    if fields.next() != Some("atomsum") {
        return Err(err(format!("expected atomsum header, got `{header}`")));
    }
    let (mut dim, mut torus, mut count) = (None, None, None);
    for f in fields {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| err(format!("malformed header field `{f}`")))?;
        match k {
            "d" => dim = v.parse::<usize>().ok(),
            "torus" => torus = v.parse::<bool>().ok(),
            "n" => count = v.parse::<usize>().ok(),
            _ => return Err(err(format!("unknown header field `{k}`"))),
        }
    }
    match (dim, torus, count) {
        (Some(d), Some(t), Some(n)) if d > 0 => Ok((d, t, n)),
        _ => Err(err(
            "header needs d=<positive>, torus=<bool>, n=<count>".into()
        )),
    }
}

/// Parses one `a w_1 … w_d b` line.
pub fn parse_atom_line(l: &str, dim: usize, line: usize) -> Result<Atom> {
    let values: Vec<f64> = l
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line,
            detail: format!("bad number in atom line `{l}`: {e}"),
        })?;
    if values.len() != dim + 2 {
        return Err(Error::Parse {
            line,
            detail: format!(
                "atom line needs {} numbers, found {}",
                dim + 2,
                values.len()
            ),
        });
    }
    Ok(Atom::new(
        values[0],
        values[1..=dim].to_vec(),
        values[dim + 1],
    ))
}
