use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Vector or matrix shapes do not line up.
    Dimension(String),
    /// A parameter violates its documented range.
    InvalidParameter(String),
    /// A value left the domain an operation is defined on.
    Domain(String),
    /// NaN or infinity where a finite value is required.
    Numeric(String),
    /// Operation not valid in the current state (e.g. sampling an undersized buffer).
    State(String),
    /// Configuration is inconsistent or incomplete.
    Config(String),
    /// Input data failed validation.
    Data(String),
    /// Malformed input file.
    Format(String),
    /// An action is outside the action space.
    Action(String),
    /// I/O failure, annotated with the path involved.
    Io { path: String, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(m) => write!(f, "dimension mismatch: {m}"),
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Numeric(m) => write!(f, "numeric error: {m}"),
            Error::State(m) => write!(f, "state error: {m}"),
            Error::Config(m) => write!(f, "config error: {m}"),
            Error::Data(m) => write!(f, "data error: {m}"),
            Error::Format(m) => write!(f, "format error: {m}"),
            Error::Action(m) => write!(f, "action error: {m}"),
            Error::Io { path, message } => write!(f, "io error on {path}: {message}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
