//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A compartment would become negative during an SIR step.
    #[error("degenerate SIR state at step {step}: {compartment} = {value}")]
    DegenerateState {
        step: usize,
        compartment: &'static str,
        value: f64,
    },

    /// A Poisson mean dropped to zero or below.
    #[error("nonpositive mean at day {day}: {value}")]
    NonpositiveMean { day: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Cholesky factorization failed even after the nugget.
    #[error("correlation matrix factorization failed")]
    FactorizationFailure,

    #[error("argument {value} outside the open interval (0, 1)")]
    DomainError { value: f64 },

    #[error("function is constant under the factor distribution")]
    ZeroVariance,

    #[error("empty draw set")]
    EmptyDraws,

    #[error("parse error in {path} line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("missing day {date} in {path}")]
    DateGap { path: PathBuf, date: String },

    #[error("infectious shift {shift} too large for series of length {len}")]
    ShiftTooLarge { shift: usize, len: usize },

    #[error("covariate column {index} ({name}) is constant; cannot scale")]
    ConstantColumn { index: usize, name: String },

    #[error("population must be positive, got {0}")]
    NegativePopulation(f64),

    #[error("horizon {horizon} requires {horizon} covariate rows, got {got}")]
    HorizonMismatch { horizon: usize, got: usize },

    #[error("missing artifact: {0}")]
    MissingArtifact(PathBuf),

    /// Fatal numerical failure inside the sampler, with iteration index.
    #[error("numerical failure at iteration {iter}: {source}")]
    Numerical {
        iter: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code category: 2 for data problems, 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateState { .. }
            | Error::NonpositiveMean { .. }
            | Error::FactorizationFailure
            | Error::ZeroVariance
            | Error::Numerical { .. } => 3,
            _ => 2,
        }
    }
}
