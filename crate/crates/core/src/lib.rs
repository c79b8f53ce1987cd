//! Cosine-atom calculus for second-order elliptic problems
//! `−∇·(A∇u) + cu = f`.
//!
//! The coefficients, the source and every iterate are finite sums of cosine
//! ridge atoms. The preconditioned Richardson iteration
//! `u ← u − α (I − Δ)⁻¹ (Lu − f)` is carried out exactly at the atom level,
//! with a running ledger of Barron-norm and support-radius growth. The
//! [`oracle`] module provides an independent spectral Galerkin reference on
//! the torus `[0, 2π)^d` and the [`sampler`] module builds Monte Carlo
//! two-layer networks from atom sums.

// `!(x > 0.0)` is used deliberately so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atoms;
pub mod calculus;
pub mod error;
pub mod fixtures;
pub mod oracle;
pub mod problem;
pub mod sampler;
pub mod solver;

pub use atoms::{canonicalize, parse_atom_line, Atom, AtomSum};
pub use calculus::{
    apply_elliptic, from_fourier_data, general_norm_bound, parse_fourier_lines, partial_derivative,
    precondition, product, rebalance, second_derivative, NormConstants, RebalancedMeasure,
};
pub use error::{Error, Result};
pub use oracle::{
    default_truncation, ellipticity_probe, fft_precondition_check, galerkin_solve, green1d_check,
    h1_distance, GalerkinSolution, ProbeEstimates, SpectralField,
};
pub use problem::EllipticProblem;
pub use sampler::{
    h1_error_exact, mean_square_bound, rate_study, sample_network, RateRow, RateStudy, TwoLayerNet,
};
pub use solver::{
    cosine_ledger_bound, iteration_count_bound, main_theorem_predictor, optimal_step, plan, solve,
    step, IterationState, LedgerEntry, SolveConfig, SolveOutcome, SolvePlan, TheoremPrediction,
};
