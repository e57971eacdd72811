//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count must be at least 1")]
    ZeroQubits,

    #[error("{n} qubits exceeds the dense-matrix limit of {n_max} (dimension grows as 2^n)")]
    DimensionOverflow { n: usize, n_max: usize },

    #[error("dimension {got} does not match expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix dimension {0} is not a power of two")]
    NotQubitDimension(usize),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("negative dephasing exponent gamma_t = {0}")]
    NegativeGamma(f64),

    #[error("parameter {name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("time {t} lies outside the tabulated range [{t_min}, {t_max}]")]
    TabulatedRange { t: f64, t_min: f64, t_max: f64 },

    #[error("invalid tabulated decoherence data: {0}")]
    TabulatedFormat(String),

    #[error("model has no closed-form kind (tabulated data)")]
    NoModelKind,

    #[error("eigendecomposition failed for dimension {0}")]
    EigenFailure(usize),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("degenerate POVM: every outcome probability is below the floor")]
    DegeneratePovm,

    #[error("initial factor i_rho = {0} is negative")]
    NegativeInitialFactor(f64),

    #[error("{states} states but {times} interrogation times")]
    LengthMismatch { states: usize, times: usize },

    #[error("interrogation times sum to {sum} but the budget total is {total}")]
    BudgetMismatch { sum: f64, total: f64 },

    #[error("no closed form for {0}")]
    UnsupportedCombination(String),

    #[error("objective appears monotone on the bracket [{lo:.3e}, {hi:.3e}]; widen the bracket")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("objective is degenerate (zero or non-finite) over the whole bracket")]
    DegenerateObjective,

    #[error("allocation optimizer failed to converge in any restart ({iterations} iterations each)")]
    NonConvergence { iterations: usize },

    #[error("power-law fit needs at least 3 points, got {0}")]
    InsufficientPoints(usize),

    #[error("power-law fit requires positive values (point {index} has value {value})")]
    NonPositiveValue { index: usize, value: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
