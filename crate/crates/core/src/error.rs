use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (zero polynomial, pole,
    /// non-prime modulus, empty sample, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is valid but beyond what the enumeration routines support.
    #[error("capability error: {0}")]
    Capability(String),

    /// The work queue outgrew its configured bound. A partial checkpoint is
    /// written first when a checkpoint path was configured.
    #[error("resource error: {message}")]
    Resource {
        message: String,
        checkpoint: Option<PathBuf>,
    },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
