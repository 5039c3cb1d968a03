use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("step-size self-check failed: populations moved by {deviation:e} under dt/2 (tolerance {tolerance:e})")]
    StepSize { deviation: f64, tolerance: f64 },

    #[error("operator is not Hermitian at t = {t} (residual {residual:e})")]
    NotHermitian { t: f64, residual: f64 },

    #[error("singular denominator in {quantity} at t = {t} (|sin| = {value:e})")]
    SingularDenominator {
        quantity: &'static str,
        t: f64,
        value: f64,
    },

    #[error("inconsistent {equation} equation at t = {t}: residual {residual:e}")]
    InconsistentPhase {
        equation: &'static str,
        t: f64,
        residual: f64,
    },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
