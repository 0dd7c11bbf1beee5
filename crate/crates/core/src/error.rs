use thiserror::Error;

/// Errors raised by the modelling, simulation and identification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed or produced a result outside tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A transfer function was evaluated on one of its poles.
    #[error("evaluation at a pole of mode {mode} (lambda = {lambda:.6e}); use a nonzero damping alpha")]
    Pole { mode: usize, lambda: f64 },

    /// A request would exceed the configured memory budget.
    #[error("resource error: {0}")]
    Resource(String),

    /// A signal carries no usable information (e.g. input spectrum below the floor).
    #[error("signal error: {0}")]
    Signal(String),

    /// Half-power points of a resonance could not be bracketed.
    #[error("bandwidth error: {0}")]
    Bandwidth(String),

    /// Malformed input data; `row` is 1-based and counts the header.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
