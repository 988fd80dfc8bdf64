use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the arguments was violated.
    InvalidArgument(String),
    /// A non-finite value appeared or an iteration did not converge.
    NumericFailure { what: String, index: Option<usize> },
    /// Too few usable data points for a fit.
    InsufficientData { usable: usize, required: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(what: impl Into<String>, index: Option<usize>) -> Self {
        Error::NumericFailure {
            what: what.into(),
            index,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NumericFailure { what, index: Some(i) } => {
                write!(f, "numeric failure: {what} (at index {i})")
            }
            Error::NumericFailure { what, index: None } => write!(f, "numeric failure: {what}"),
            Error::InsufficientData { usable, required } => write!(
                f,
                "insufficient data: {usable} usable points, at least {required} required"
            ),
        }
    }
}

impl core::error::Error for Error {}
