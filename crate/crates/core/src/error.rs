use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configuration value failed validation. `key` is the configuration
    /// key as it appears in run files.
    #[error("invalid configuration value for `{key}`: {reason}")]
    Config { key: &'static str, reason: String },

    #[error("estimation error: {0}")]
    Estimation(String),

    /// The buffer and a transmission plan disagree. Indicates a bug; the run
    /// is aborted.
    #[error("internal consistency fault: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn config(key: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            key,
            reason: reason.into(),
        }
    }
}
