//! Monte Carlo compression of atom sums into width-`k` two-layer cosine
//! networks, plus the empirical rate study.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::atoms::{Atom, AtomSum};
use crate::calculus::rebalance;
use crate::error::{Error, Result};

/// `g_k(x) = (1/k) Σ aᵢ cos(wᵢ·x + bᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLayerNet {
    pub dim: usize,
    pub torus: bool,
    pub params: Vec<(f64, Vec<f64>, f64)>,
}

impl TwoLayerNet {
    pub fn width(&self) -> usize {
        self.params.len()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let k = self.width() as f64;
        self.params
            .iter()
            .map(|(a, w, b)| {
                let arg: f64 = w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b;
                a * arg.cos()
            })
            .sum::<f64>()
            / k
    }

    pub fn to_atom_sum(&self) -> Result<AtomSum> {
        let k = self.width() as f64;
        let atoms = self
            .params
            .iter()
            .map(|(a, w, b)| Atom::new(a / k, w.clone(), *b))
            .collect();
        AtomSum::new(self.dim, self.torus, atoms)
    }
}

/// Draws `k` i.i.d. atoms with probability `|aᵢ|/ℓ` and outer weight
/// `sign(aᵢ)·ℓ`, so that `E g_k = g`.
pub fn sample_network(g: &AtomSum, k: usize, seed: u64) -> Result<TwoLayerNet> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "network width must be positive".into(),
        ));
    }
    let m = rebalance(g)?;
    let dist = WeightedIndex::new(m.atoms.iter().map(|a| a.probability))
        .map_err(|e| Error::InvalidArgument(format!("sampling weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = (0..k)
        .map(|_| {
            let a = &m.atoms[dist.sample(&mut rng)];
            (a.sign * m.total_mass, a.frequency.clone(), a.phase)
        })
        .collect();
    Ok(TwoLayerNet {
        dim: g.dim(),
        torus: g.is_torus(),
        params,
    })
}

/// `‖g_k − g‖_{H¹}` computed exactly from the merged atom representation.
pub fn h1_error_exact(net: &TwoLayerNet, g: &AtomSum) -> Result<f64> {
    net.to_atom_sum()?.sub(g)?.h1_norm_torus()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub k: usize,
    pub rms_error: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudy {
    /// `errors[i][t]` is the H¹ error at `widths[i]`, trial `t`.
    pub widths: Vec<usize>,
    pub errors: Vec<Vec<f64>>,
    pub rows: Vec<RateRow>,
    /// Least-squares slope of `ln rms` against `ln k`, `None` when fewer
    /// than two rows have nonzero error.
    pub slope: Option<f64>,
    pub slope_stderr: Option<f64>,
}

impl RateStudy {
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("k,trial,h1_error\n");
        for (k, errs) in self.widths.iter().zip(&self.errors) {
            for (t, e) in errs.iter().enumerate() {
                out.push_str(&format!("{k},{t},{e:e}\n"));
            }
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("k,rms_error,bound,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                r.k, r.rms_error, r.bound, r.ratio
            ));
        }
        match (self.slope, self.slope_stderr) {
            (Some(s), Some(se)) => out.push_str(&format!("# slope,{s:.6},stderr,{se:.6}\n")),
            _ => out.push_str("# slope,degenerate\n"),
        }
        out
    }
}

/// `2(1+R²)ℓ²/k`, the mean-square H¹ bound for a width-`k` sample.
pub fn mean_square_bound(g: &AtomSum, k: usize) -> f64 {
    let l = g.tracked_norm();
    let r = g.support_radius();
    2.0 * (1.0 + r * r) * l * l / k as f64
}

fn fit_slope(rows: &[RateRow]) -> (Option<f64>, Option<f64>) {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.rms_error > 0.0)
        .map(|r| ((r.k as f64).ln(), r.rms_error.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return (None, None);
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let stderr = if n > 2 {
        let rss: f64 = pts
            .iter()
            .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
            .sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (Some(slope), Some(stderr))
}

/// Runs `trials` independent samples per width; trial `t` uses seed
/// `seed + t` regardless of width.
pub fn rate_study(g: &AtomSum, widths: &[usize], trials: usize, seed: u64) -> Result<RateStudy> {
    if trials < 30 {
        return Err(Error::InvalidArgument(format!(
            "need at least 30 trials, got {trials}"
        )));
    }
    if widths.is_empty() || widths.windows(2).any(|w| w[0] >= w[1]) || widths[0] == 0 {
        return Err(Error::InvalidArgument(
            "widths must be positive and strictly increasing".into(),
        ));
    }
    if !g.is_torus() {
        return Err(Error::NotTorus);
    }
    let mut errors = Vec::with_capacity(widths.len());
    let mut rows = Vec::with_capacity(widths.len());
    for &k in widths {
        let errs = (0..trials)
            .into_par_iter()
            .map(|t| {
                let net = sample_network(g, k, seed.wrapping_add(t as u64))?;
                h1_error_exact(&net, g)
            })
            .collect::<Result<Vec<f64>>>()?;
        let rms = (errs.iter().map(|e| e * e).sum::<f64>() / trials as f64).sqrt();
        let bound = mean_square_bound(g, k).sqrt();
        rows.push(RateRow {
            k,
            rms_error: rms,
            bound,
            ratio: rms / bound,
        });
        errors.push(errs);
    }
    let (slope, slope_stderr) = fit_slope(&rows);
    Ok(RateStudy {
        widths: widths.to_vec(),
        errors,
        rows,
        slope,
        slope_stderr,
    })
}
