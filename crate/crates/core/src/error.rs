use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The truncated Fock space cannot hold the requested state or displacement.
    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid state specification: {0}")]
    InvalidSpec(String),

    #[error("operation requires a {expected} state specification")]
    WrongVariant { expected: &'static str },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("invalid feedback parameters: {0}")]
    InvalidParams(String),

    #[error("integrator diagnostics out of bounds: {0}")]
    Stability(String),

    #[error("numerical residue too large: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 1 for input/config problems, 2 for numerical diagnostics.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stability(_) | Error::Numerical(_) => 2,
            _ => 1,
        }
    }
}
