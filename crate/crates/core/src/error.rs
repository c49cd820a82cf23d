use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence after {iterations} iterations (bracket width {width:e})")]
    Convergence { iterations: usize, width: f64 },

    #[error("degenerate operating point: {0}")]
    Degenerate(String),

    #[error("operation requires the {expected} regime, point is {actual}")]
    Regime {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("moment order {0} exceeds the supported maximum of 4")]
    Order(u32),

    #[error("logarithm of zero in cumulant generating function")]
    SingularLog,

    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
