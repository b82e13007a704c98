use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("points coincide; angle is undefined")]
    CoincidentPoints,

    #[error("{what} = {value} is outside the valid domain ({expected})")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error in `{key}`: {reason}")]
    Parse { key: String, reason: String },
}

impl Error {
    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Self {
        Error::OutOfDomain {
            what,
            value,
            expected,
        }
    }

    pub fn parse(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
