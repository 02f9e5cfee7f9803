use thiserror::Error;

/// Library-wide error type.
///
/// The variants group into the three failure classes the CLI maps to exit
/// codes: invalid input, numerical failure and blow-up.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(
        "newton iteration did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("eigensolver failed to converge: {0}")]
    EigenFailure(String),

    #[error("solution blew up at t = {t:.6} (sup norm {sup_norm:.3e})")]
    BlowUp { t: f64, sup_norm: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Domain(_) | Error::Invalid(_) => 2,
            Error::NewtonDiverged { .. } | Error::Singular(_) | Error::EigenFailure(_) => 3,
            Error::BlowUp { .. } => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
