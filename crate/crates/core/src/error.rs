use std::path::PathBuf;

use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field holds a value outside its documented range.
    #[error("invalid configuration: {field}: {message}")]
    Config {
        field: &'static str,
        message: String,
    },

    /// Inputs are structurally valid but outside the model's domain,
    /// e.g. a receiver closer to the emitter than the path-loss guard allows.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller asked for something the API cannot do, e.g. an empty
    /// measurement set or a checkpoint past the final iteration.
    #[error("usage error: {0}")]
    Usage(String),

    /// A variant name that does not appear in the variant table.
    #[error("unknown variant name: {0:?} (run `variants` for the full list)")]
    UnknownVariant(String),

    /// The normal equations are singular, typically from collinear receivers.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// An iterative solver produced a non-finite iterate.
    #[error("solver diverged: {0}")]
    Divergence(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
