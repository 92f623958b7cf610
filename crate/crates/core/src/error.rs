use thiserror::Error;

/// Errors raised by inference, decoding and the file interfaces.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input data (observations, paths, marginals).
    #[error("input error: {0}")]
    Input(String),

    /// Invalid model parameters.
    #[error("model error: {0}")]
    Model(String),

    /// Invalid configuration (schema violation, bad cost values).
    #[error("config error: {0}")]
    Config(String),

    /// Externally supplied data failed a consistency check.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// A brute-force oracle was asked to enumerate too many paths.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }

    /// Process exit code for the command-line front end.
    ///
    /// 0 success, 2 input/config error, 3 data-consistency error, 1 internal error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Model(_) | Error::Config(_) | Error::Capacity(_) => 2,
            Error::Consistency(_) => 3,
            Error::Io { .. } => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
