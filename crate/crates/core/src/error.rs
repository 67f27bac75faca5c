use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input value (zero counts, nonpositive sides, wrong arity).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A documented algorithm precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("movement log not chained for sensor {sensor} at move {step}")]
    BrokenChain { sensor: usize, step: usize },

    #[error("index {index} out of range 1..={max} on axis {axis}")]
    IndexOutOfRange { axis: usize, index: usize, max: usize },

    #[error("exact coverage check too large ({cells:.3e} cells); use sampled verification")]
    TooLarge { cells: f64 },

    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {error:e})")]
    Quadrature { subdivisions: usize, error: f64 },

    #[error("root solve failed: {0}")]
    RootSolve(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
