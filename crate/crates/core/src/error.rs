use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A hardware or lattice parameter violates one of its invariants.
    #[error("{0}")]
    InvalidParams(String),

    /// Malformed configuration document.
    #[error("config error: {0}")]
    Config(String),

    #[error("config not found: {0}")]
    ConfigNotFound(String),

    /// The fixed-point iteration did not settle.
    #[error("fixed-point solver did not converge after {iterations} iterations (ratio {ratio}, exponent {exponent})")]
    NoConvergence {
        ratio: f64,
        exponent: u32,
        iterations: usize,
    },

    /// `N = R logᵖ N` has no fixed point above 1.
    #[error("no fixed point above 1 for ratio {ratio} and exponent {exponent}")]
    NoFixedPoint { ratio: f64, exponent: u32 },

    #[error("step too large: dt = {dt} exceeds 0.01/omega_max = {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized (norm {0})")]
    Unnormalized(f64),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("state-vector cap exceeded: register dimension {dim} > {cap}")]
    StateVectorCap { dim: usize, cap: usize },

    #[error("{0}")]
    InvalidTree(String),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("light cone: {0}")]
    LightCone(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
