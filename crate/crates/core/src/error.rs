use thiserror::Error;

/// Errors raised by graph construction, spectral analysis and the transfer predicates.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function (for example `nu2(0)`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Checked integer arithmetic overflowed.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// A graph was malformed (bad vertex index, negative weight, ...).
    #[error("invalid graph: {0}")]
    Graph(String),

    /// The hypotheses of a closed-form result are not met by the input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The eigensolver did not converge.
    #[error("eigensolver did not converge after {sweeps} sweeps on a {order}x{order} matrix (off-diagonal norm {off_norm:.3e})")]
    NoConvergence {
        sweeps: usize,
        order: usize,
        off_norm: f64,
    },

    /// A closed-form result and the dense spectral oracle disagree.
    #[error("closed form and spectral oracle disagree: {0}")]
    Inconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconsistency(_) => 3,
            Error::Io(_) | Error::Json(_) | Error::NoConvergence { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
