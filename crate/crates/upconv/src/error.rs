use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate dispersion: |k'_s − k'_i| = {gap:e} s/m at or below floor {floor:e}; \
             the linearized-mismatch closed forms have a pole here")]
    DegenerateDispersion { gap: f64, floor: f64 },

    #[error("quadrature did not converge: error estimate {error:e} vs tolerance {tolerance:e} \
             after {subdivisions} subdivisions")]
    NonConvergence { error: f64, tolerance: f64, subdivisions: usize },

    #[error("grid axis mismatch: {0}")]
    AxisMismatch(String),

    #[error("spacer configuration not matched: {0}")]
    NotMatched(String),

    #[error("no positive crystal length satisfies the perturbed condition: {0}")]
    NoRealLength(String),

    #[error("correction lookup on a failure outcome")]
    FailureOutcome,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
