use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("invalid value for `{key}`: {reason}")]
    Validation { key: String, reason: String },

    #[error("{0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation { .. } => 3,
            CliError::Numerical(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn validation(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation { key: key.into(), reason: reason.into() }
    }
}

impl From<skylink::Error> for CliError {
    fn from(e: skylink::Error) -> Self {
        use skylink::Error as E;
        match e {
            E::Parse { key, reason } => CliError::Validation { key, reason },
            E::InvalidParameter { name, reason } => CliError::Validation { key: name, reason },
            E::OutOfDomain { what, value, expected } => {
                CliError::Validation { key: what.to_string(), reason: format!("{value} outside {expected}") }
            }
            E::CoincidentPoints => CliError::validation("points", "coincident points"),
            e @ (E::Infeasible(_) | E::Numerical(_)) => CliError::Numerical(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
