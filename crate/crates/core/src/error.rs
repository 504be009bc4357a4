//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Profile or potential parameters violate a constructor invariant.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// Derivative order outside the supported range (p ≤ 4).
    #[error("unsupported derivative order {0} (max 4)")]
    UnsupportedOrder(usize),

    /// Hermite evaluation outside the stable range (n ≤ 30, |t| ≤ 40).
    #[error("hermite range error: n={n}, t={t}")]
    HermiteRange { n: usize, t: f64 },

    /// Iteration failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Fiber grid could not contain the classical turning points.
    #[error("fiber grid failure: {0}")]
    GridFailure(String),

    /// Band is flat (constant field); the threshold gap has no inverse.
    #[error("degenerate band: {0}")]
    DegenerateBand(String),

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// (σ, τ) outside the admissible remainder window.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Spectral parameter sits inside a band instead of a gap.
    #[error("spectral position error: {0}")]
    SpectralPosition(String),

    /// Malformed experiment configuration.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
