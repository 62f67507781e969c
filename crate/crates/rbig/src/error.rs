use thiserror::Error;

/// Error type shared across the crate.
///
/// The taxonomy separates data errors (degenerate or non-finite inputs),
/// configuration errors (invalid parameters), numeric errors (failed
/// factorizations), generation errors (sampler rejection exhaustion), and
/// persistence problems. `Usage` is reserved for CLI-level misuse and maps
/// to exit code 2.
#[derive(Debug, Error)]
pub enum RbigError {
    /// Scalar function called outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data violates a precondition (non-finite values, too few rows,
    /// mismatched shapes).
    #[error("data error: {0}")]
    Data(String),

    /// Invalid configuration parameter.
    #[error("config error: {0}")]
    Config(String),

    /// A marginal with fewer than two distinct values (constant column).
    #[error("degenerate marginal: {0}")]
    DegenerateMarginal(String),

    /// Numeric failure (factorization did not converge, singular matrix
    /// after ridge, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Synthetic sampler could not produce a valid instance.
    #[error("generation error: {0}")]
    Generation(String),

    /// Text input (CSV, model document) that does not parse.
    #[error("parse error: {0}")]
    Parse(String),

    /// A persisted model that parses but fails validation.
    #[error("model validation error: {0}")]
    ModelValidation(String),

    /// CLI-level misuse (unsupported measure/family pair, missing file
    /// argument, ...).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RbigError>;
