use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("spin quantum number {0} is not a non-negative multiple of 1/2")]
    InvalidSpin(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("slot {slot} out of range for {len} particles")]
    SlotOutOfRange { slot: usize, len: usize },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("eigendecomposition failed to converge")]
    EigenFailure,

    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid config: {0}")]
    Validation(String),

    #[error("{what} dimension {dim} exceeds the cap of {cap}")]
    DimensionCap {
        what: &'static str,
        dim: usize,
        cap: usize,
    },

    #[error(
        "unequal recombination rates (ks = {ks:e}, kt = {kt:e}); the factorized paths require ks = kt, \
         use oracle::integrate_master_equation for unequal rates"
    )]
    UnequalRates { ks: f64, kt: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singlet yield has an imaginary residual of {0:.3e}")]
    ImaginaryResidual(f64),

    #[error("density matrix trace {trace:.3e} is not unit (tolerance {tolerance:.0e})")]
    TraceNotUnit { trace: f64, tolerance: f64 },

    #[error("density matrix has eigenvalue {0:.3e} below the positivity tolerance")]
    NegativeEigenvalue(f64),

    #[error("density matrix trace {0:.3e} is too small to renormalize")]
    DegenerateState(f64),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
