use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("kernel validation failed: {0}")]
    Kernel(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch between fields")]
    GridMismatch,

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("stability condition violated: dt = {dt} exceeds the admissible {max_dt}")]
    Cfl { dt: f64, max_dt: f64 },

    #[error("singular tridiagonal system: pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    #[error("non-finite value in cell {cell} after step {step}")]
    NonFinite { step: usize, cell: usize },

    #[error("domain too small for the periodic spectral flow: {0}")]
    DomainTooSmall(String),

    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),
}

impl Error {
    /// Step index for solver aborts that happen mid-run.
    pub fn step(&self) -> Option<usize> {
        match self {
            Error::NonFinite { step, .. } => Some(*step),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
