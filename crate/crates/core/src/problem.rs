//! The data of `−∇·(A∇u) + cu = f` as atom sums.

use crate::atoms::AtomSum;
use crate::error::{Error, Result};

/// Coefficients, source and user-supplied spectral bounds of an elliptic
/// problem. `A` is stored densely and is symmetric atom for atom.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticProblem {
    dim: usize,
    torus: bool,
    a: Vec<AtomSum>,
    c: AtomSum,
    f: AtomSum,
    lambda_min: f64,
    lambda_max: f64,
}

impl EllipticProblem {
    pub fn new(
        a: Vec<Vec<AtomSum>>,
        c: AtomSum,
        f: AtomSum,
        lambda_min: f64,
        lambda_max: f64,
    ) -> Result<Self> {
        let dim = c.dim();
        let torus = c.is_torus();
        if a.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: a.len(),
            });
        }
        for s in a.iter().flatten().chain([&f]) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            if s.is_torus() != torus {
                return Err(Error::ModeMismatch);
            }
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for j in 0..i {
                if a[i][j] != a[j][i] {
                    return Err(Error::InvalidArgument(format!(
                        "coefficient matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if !(lambda_min > 0.0 && lambda_max >= lambda_min && lambda_max.is_finite()) {
            return Err(Error::InvalidSpectralBounds {
                min: lambda_min,
                max: lambda_max,
            });
        }
        Ok(Self {
            dim,
            torus,
            a: a.into_iter().flatten().collect(),
            c,
            f,
            lambda_min,
            lambda_max,
        })
    }

    /// `A = I` with the given reaction and source.
    pub fn isotropic(
        dim: usize,
        torus: bool,
        c: AtomSum,
        f: AtomSum,
        lambda_min: f64,
        lambda_max: f64,
    ) -> Result<Self> {
        let one = AtomSum::constant(dim, torus, 1.0);
        let zero = AtomSum::zero(dim, torus);
        let a = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { one.clone() } else { zero.clone() })
                    .collect()
            })
            .collect();
        Self::new(a, c, f, lambda_min, lambda_max)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_torus(&self) -> bool {
        self.torus
    }

    pub fn a(&self, i: usize, j: usize) -> &AtomSum {
        &self.a[i * self.dim + j]
    }

    pub fn c(&self) -> &AtomSum {
        &self.c
    }

    pub fn f(&self) -> &AtomSum {
        &self.f
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Same coefficients with a different source term.
    pub fn with_source(&self, f: AtomSum) -> Result<Self> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        if f.is_torus() != self.torus {
            return Err(Error::ModeMismatch);
        }
        Ok(Self { f, ..self.clone() })
    }

    /// `ℓ_A`: the largest tracked norm over the entries of `A`.
    pub fn l_a(&self) -> f64 {
        self.a.iter().map(AtomSum::tracked_norm).fold(0.0, f64::max)
    }

    pub fn l_c(&self) -> f64 {
        self.c.tracked_norm()
    }

    pub fn l_f(&self) -> f64 {
        self.f.tracked_norm()
    }

    /// `R_A`: the largest support radius over the entries of `A`.
    pub fn r_a(&self) -> f64 {
        self.a
            .iter()
            .map(AtomSum::support_radius)
            .fold(0.0, f64::max)
    }

    pub fn r_c(&self) -> f64 {
        self.c.support_radius()
    }

    pub fn r_f(&self) -> f64 {
        self.f.support_radius()
    }

    /// `max{R_A, R_c, R_f}`, the per-step radius increment.
    pub fn radius_increment(&self) -> f64 {
        self.r_a().max(self.r_c()).max(self.r_f())
    }

    /// Largest absolute integer frequency in `A` and `c`.
    pub fn max_coefficient_frequency(&self) -> f64 {
        self.a
            .iter()
            .chain([&self.c])
            .map(AtomSum::max_abs_frequency)
            .fold(0.0, f64::max)
    }

    pub fn has_diagonal_a(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.a(i, j).is_empty()))
    }
}
