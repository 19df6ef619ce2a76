use thiserror::Error;

/// Errors surfaced by the library. Precondition violations carry enough
/// context to point at the offending input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature of {integral} did not converge within the subdivision budget")]
    QuadratureNonConvergence { integral: String },

    #[error("no admissible bandwidth in range [{lo:.6e}, {hi:.6e}]")]
    NoAdmissibleBandwidth { lo: f64, hi: f64 },

    #[error("insufficient replicates: need at least {needed}, got {got}")]
    InsufficientReplicates { needed: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
