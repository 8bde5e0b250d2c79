use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for ingestion, configuration, and evaluation.
///
/// The CLI maps these onto exit codes: input problems (`Io`, `Parse`,
/// `Config`) exit with 2, evaluation problems (`InvalidInput`, `Metric`,
/// `Internal`) exit with 1.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Filesystem error, annotated with the path that failed.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed track or scenario file. `line` is 1-based and counts
    /// every line in the file, comments included.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    /// Bad configuration key or value.
    #[error("config: {0}")]
    Config(String),

    /// Inputs that parse but cannot be evaluated (empty ground truth,
    /// mismatched video lengths, out-of-range frames, ...).
    #[error("{0}")]
    InvalidInput(String),

    /// A metric is undefined for the given data (e.g. averaging range
    /// contains no curve points).
    #[error("{0}")]
    Metric(String),

    /// Invariant violation that indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Exit code the CLI should use for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Config(_) => 2,
            Error::InvalidInput(_) | Error::Metric(_) | Error::Internal(_) => 1,
        }
    }
}
