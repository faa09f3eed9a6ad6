use thiserror::Error;

/// Crate-wide error type. Variants map one-to-one onto the machine-readable
/// categories reported by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad run configuration (sizes, orderings, unknown kernels, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A value violates a documented precondition or invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Mismatched lengths or otherwise unusable call arguments.
    #[error("argument error: {0}")]
    Argument(String),

    /// A linear solve or eigenvalue computation failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Time step rejected by the stability bound.
    #[error("stability error: {0}")]
    Stability(String),

    /// Geometry that cannot be realised (strip wider than the disc, ...).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A null space that should be one-dimensional is not.
    #[error("degeneracy error: {0}")]
    Degeneracy(String),

    /// Unbounded reflection count or similar runaway iteration.
    #[error("runaway error: {0}")]
    Runaway(String),

    /// Rejection sampler exceeded its iteration cap.
    #[error("sampler failure: {0}")]
    Sampler(String),

    /// An internal invariant was violated; indicates a bug upstream.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short category tag used in CLI error reports and exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Validation(_) => "validation",
            Error::Domain(_) => "domain",
            Error::Argument(_) => "argument",
            Error::Numerical(_) => "numerical",
            Error::Stability(_) => "stability",
            Error::Geometry(_) => "geometry",
            Error::Degeneracy(_) => "degeneracy",
            Error::Runaway(_) => "runaway",
            Error::Sampler(_) => "sampler",
            Error::Internal(_) => "internal",
            Error::Parse(_) => "parse",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit code for the CLI; 0 is reserved for success.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) => 2,
            Error::Validation(_) | Error::Domain(_) | Error::Argument(_) => 3,
            Error::Numerical(_) | Error::Stability(_) | Error::Degeneracy(_) => 4,
            Error::Io { .. } => 5,
            _ => 6,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
