use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate cone: {0}")]
    DegenerateCone(String),

    #[error("point is not in the cone")]
    NotInCone,

    #[error("point is not in the interior of the cone")]
    NotInInterior,

    #[error("zero vector has no normalization")]
    ZeroVector,

    #[error("functional is not strictly positive on the cone: {0}")]
    FunctionalNotInterior(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("map annihilates a nonzero input (not completely monotone at {witness:?})")]
    MapAnnihilates { witness: Vec<f64> },

    #[error("index {index} exceeds the generator budget of 2^48")]
    IndexBudget { index: i64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no admissible sample: {0}")]
    NoAdmissibleSample(String),

    #[error("solve did not converge: {0}")]
    NotConverged(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
