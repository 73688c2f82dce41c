use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("non-finite data: {0}")]
    NonFinite(String),

    /// A point too close to the origin to define a tangent space.
    #[error("degenerate point: {0}")]
    Degenerate(String),

    #[error("dense Hessian for n = {n} exceeds the cap of {cap}; use the quadratic-form path")]
    Capacity { n: usize, cap: usize },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 2,
            Error::Dimension(_)
            | Error::ModelMismatch(_)
            | Error::NonFinite(_)
            | Error::Format(_)
            | Error::Io { .. } => 3,
            Error::Degenerate(_)
            | Error::Capacity { .. }
            | Error::Contract(_)
            | Error::Consistency(_) => 4,
        }
    }
}

pub(crate) fn check_dims(what: &str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension(format!(
            "{what}: expected length {expected}, found {found}"
        )));
    }
    Ok(())
}
