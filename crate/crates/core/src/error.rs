use thiserror::Error;

/// Errors raised by the simulator, builders and estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {num_qubits} qubits requested, ceiling is {ceiling}")]
    Capacity { num_qubits: usize, ceiling: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty shot set")]
    EmptyShots,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("config parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity { .. } => 3,
            Error::Io { .. } => 4,
            Error::Validation(_) | Error::Domain(_) | Error::EmptyShots | Error::Parse(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
