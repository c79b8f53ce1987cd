//! Quadrature check of the one-dimensional screened-Poisson Green's function
//! `G(x) = ½ e^{−|x|}`: convolving it with `cos(w·)` must scale by
//! `1/(1 + w²)`.

use crate::error::{Error, Result};

// 5-point Gauss–Legendre rule on [−1, 1].
const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut acc = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            acc += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * acc;
    }
    total
}

/// `|∫_{−H}^{H} ½e^{−|y|} cos(w(x − y)) dy − 1/(1 + w²)|` at `x = 0`.
///
/// `n_nodes` is the number of quadrature nodes per half-line; the kink of
/// the kernel at 0 is a panel boundary.
pub fn green1d_check(w: f64, quadrature_halfwidth: f64, n_nodes: usize) -> Result<f64> {
    if quadrature_halfwidth < 40.0 {
        return Err(Error::InvalidArgument(format!(
            "quadrature half-width {quadrature_halfwidth} < 40 leaves a visible kernel tail"
        )));
    }
    let panels = n_nodes / GL_NODES.len();
    if panels == 0 {
        return Err(Error::UnderResolved("fewer nodes than one panel".into()));
    }
    let h = quadrature_halfwidth / panels as f64;
    // at least ~6 panels per oscillation period
    if w.abs() * h > 1.0 {
        return Err(Error::UnderResolved(format!(
            "panel width {h} too coarse for oscillation w = {w}"
        )));
    }
    let x = 0.0;
    let kernel = |y: f64| 0.5 * (-y.abs()).exp() * (w * (x - y)).cos();
    let left = gauss_legendre(kernel, -quadrature_halfwidth, 0.0, panels);
    let right = gauss_legendre(kernel, 0.0, quadrature_halfwidth, panels);
    Ok((left + right - 1.0 / (1.0 + w * w)).abs())
}
