use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A fixed-column field could not be decoded.
    #[error("TLE line {line}, columns {start}-{end}: {reason}")]
    TleParse {
        line: u8,
        start: usize,
        end: usize,
        reason: String,
    },

    #[error("TLE line {line} checksum mismatch: computed {computed}, found {found}")]
    Checksum { line: u8, computed: u32, found: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("index {index} out of range for {len}")]
    Index { index: usize, len: usize },

    #[error("parameter slot {0} does not drive a rotation gate")]
    UnsupportedGate(usize),

    #[error("invalid state: {0}")]
    State(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("cannot compare summaries: {0}")]
    Comparison(String),

    #[error("malformed {what}: {reason}")]
    Format { what: &'static str, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
