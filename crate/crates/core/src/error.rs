//! Error type shared by every module in the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced while loading inputs or running an analysis.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A TLE line failed its mod-10 checksum.
    #[error("checksum mismatch on line {line}: computed {computed}, recorded {recorded}")]
    Checksum {
        /// 1-based line number within the input text.
        line: usize,
        computed: u32,
        recorded: u32,
    },

    /// Malformed input: bad TLE columns, bad CSV layout, bad scenario file.
    #[error("format error: {0}")]
    Format(String),

    /// A numeric field was syntactically valid but outside its legal range.
    #[error("value out of range: {0}")]
    Range(String),

    /// Underlying I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A scenario referenced an entity that does not exist or mismatches.
    #[error("cross-reference error: {0}")]
    CrossReference(String),

    /// SGP4 could not produce a state (orbit decayed or went hyperbolic).
    #[error("propagation failed for satellite {satellite}: {detail}")]
    Decay { satellite: String, detail: String },

    /// An analysis scope contains no stations, no satellites, or no data.
    #[error("empty network: {0}")]
    EmptyNetwork(String),

    /// Matrix dimensions are inconsistent with the requested operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An iterative numerical routine failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Division by a zero-duration window or an empty aggregate.
    #[error("division by zero: {0}")]
    Division(String),
}

impl Error {
    /// Builds an [`Error::Io`] carrying the offending path.
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
