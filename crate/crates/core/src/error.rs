use thiserror::Error;

/// Errors raised by the library. Each variant maps to one rejected input or
/// numerical failure; none of them are recoverable inside the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("defect cell {cell} out of range 1..={cells}")]
    DefectOutOfRange { cell: usize, cells: usize },

    #[error("periodic chain needs an even number of defects, got {0}")]
    OddDefectCount(usize),

    #[error("matrix is not symmetric: max |A - A^T| = {0:e}")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge after {iterations} sweeps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("expected 2 near-zero modes, found {0}")]
    ZeroModeCount(usize),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("window contains {0} defects; at most one is supported")]
    TooManyDefectsInWindow(usize),

    #[error("correlation eigenvalue {0} outside [0, 1]")]
    EigenvalueOutOfRange(f64),

    #[error("Renyi index n = 1 is the von Neumann limit; use the von Neumann routine")]
    RenyiIndexOne,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("target charge {target} outside achievable range ({lo}, {hi})")]
    ChargeOutOfRange { target: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
