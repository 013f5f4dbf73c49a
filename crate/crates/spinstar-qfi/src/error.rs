//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by state construction, linear algebra and sweep configuration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("not a density matrix: {violation}")]
    NotDensityMatrix { violation: String },

    #[error("empty fragment: no environment spins to measure")]
    EmptyFragment,

    #[error("invalid subsystem index {index} for {n_factors} tensor factors")]
    BadSubsystemIndex { index: usize, n_factors: usize },

    #[error("{parameter} out of domain: {value} ({constraint})")]
    Domain {
        parameter: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("theta = {theta} sits on a pointer state; the symmetric logarithmic derivative is singular there")]
    ThetaBoundary { theta: f64 },

    #[error("no information encoded: quantum Fisher information vanishes at this point")]
    NoInformation,

    #[error("zero-mean coupling ensembles have a different thermodynamic precision law; this regime is not supported")]
    ZeroMeanEnsemble,

    #[error("{n_qubits} qubits exceeds the exact-reference cap of {cap}")]
    SizeCap { n_qubits: usize, cap: usize },

    #[error("invalid sweep configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
