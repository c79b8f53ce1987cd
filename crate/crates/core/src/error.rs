use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("torus mode mismatch between operands")]
    ModeMismatch,
    #[error("operation requires torus mode")]
    NotTorus,
    #[error("non-integer frequency component {0} in torus mode")]
    NonIntegerFrequency(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("the zero function admits no probability representation")]
    ZeroSum,
    #[error("duplicate canonical frequency {0:?}")]
    DuplicateFrequency(Vec<f64>),
    #[error("invalid spectral bounds lambda_min={min}, lambda_max={max}")]
    InvalidSpectralBounds { min: f64, max: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ledger violation at step {step}: {detail}")]
    LedgerViolation { step: usize, detail: String },
    #[error("coefficients are not uniformly elliptic: {0}")]
    NotElliptic(String),
    #[error("user spectral bounds rejected by probe: {0}")]
    ProbeFailure(String),
    #[error("truncation K={k} too small: {detail}")]
    TruncationTooSmall { k: usize, detail: String },
    #[error("galerkin system could not be solved: {0}")]
    SingularSystem(String),
    #[error("under-resolved discretization: {0}")]
    UnderResolved(String),
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
}
