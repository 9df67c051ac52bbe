use thiserror::Error;

/// Errors raised by the library.
///
/// [`Error::Internal`] marks a failed self-consistency check between two
/// independent evaluation routes; every other variant is a rejected input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("decay base a = {0} must exceed 2")]
    DecayBase(f64),
    #[error("removal ratio s_{level} = {value} outside (1/3, 1)")]
    RemovalRatio { level: usize, value: f64 },
    #[error("depth {depth} exceeds the configured maximum {max}")]
    DepthExceeded { depth: usize, max: usize },
    #[error("level must be at least {min}, got {got}")]
    LevelTooSmall { min: usize, got: usize },
    #[error("point {0} lies outside [0, 1]")]
    OutOfUnitInterval(f64),
    #[error("point {0} does not lie on any interval of the current level")]
    NotOnCantorSet(f64),
    #[error("radius must be positive, got {0}")]
    Radius(f64),
    #[error("step h = {h} too large for r = {r}")]
    StepTooLarge { r: f64, h: f64 },
    #[error("quadrature needs depth >= 1 and nodes >= 1")]
    Quadrature,
    #[error("need at least {need} fit points, got {got}")]
    InsufficientPoints { need: usize, got: usize },
    #[error("sample {0} lies on the Cantor set at the current resolution")]
    SampleOnSet(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("ideal is not primary to the maximal ideal (missing pure power on axis {0})")]
    NotPrimary(usize),
    #[error("empty generator set")]
    EmptyIdeal,
    #[error("invalid family parameters: {0}")]
    Family(String),
    #[error("grid resolution {0} below the minimum of 16")]
    Resolution(usize),
    #[error("coordinate must be nonnegative")]
    NegativeCoordinate,
    #[error("input exceeds desk-scale limits: {0}")]
    TooLarge(String),
    #[error("c = {0} outside [0, 1]")]
    CRange(String),
    #[error("invalid intersection table: {0}")]
    Iota(String),
    #[error("c * d = {0} is not an integer")]
    NonIntegralScale(String),
    #[error("lambda must be positive, got {0}")]
    Lambda(String),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
