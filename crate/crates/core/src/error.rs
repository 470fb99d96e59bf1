use thiserror::Error;

pub type Result<T> = std::result::Result<T, BdiesError>;

#[derive(Debug, Error)]
pub enum BdiesError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid resolution: {0}")]
    InvalidResolution(String),

    #[error("node count mismatch: expected {expected}, found {found}")]
    NodeMismatch { expected: usize, found: usize },

    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,

    #[error(
        "domain diameter {diameter} violates diam < 1, which the single-layer \
         invertibility and the equivalence of the integral system require"
    )]
    DiameterViolation { diameter: f64 },

    #[error("target at distance {distance:.3e} from the boundary is closer than {threshold:.3e}")]
    TargetTooClose { distance: f64, threshold: f64 },

    #[error("target {0:?} lies outside the closed domain")]
    TargetOutside([f64; 2]),

    #[error("polar rule construction failed: {0}")]
    PolarRule(String),

    #[error("geometry inconsistency: {0}")]
    Geometry(String),

    #[error("coefficient is not positive at ({x}, {y}): a = {value}")]
    NonPositiveCoefficient { x: f64, y: f64, value: f64 },

    #[error("coefficient derivative check failed: {what} deviates by {deviation:.3e} (tolerance {tolerance:.1e})")]
    DerivativeCheck {
        what: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("unknown manufactured case `{0}`")]
    UnknownCase(String),

    #[error("the finite-difference oracle only supports disk domains")]
    NotADisk,

    #[error("system matrix is singular")]
    SingularMatrix,

    #[error("non-finite value in {0}")]
    NonFinite(String),
}
