//! Error type shared by the simulation core.

/// Errors produced by basis construction, model building, solvers and the
/// trajectory engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("index out of range: {what} = {got}, limit {limit}")]
    IndexOutOfRange {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension {dim} exceeds cap {cap} for {what}")]
    CapExceeded {
        what: &'static str,
        dim: usize,
        cap: usize,
    },

    #[error("steady state is degenerate or ill-conditioned: {0}")]
    DegenerateSteadyState(String),

    #[error("integrator step failed at t = {t_us} us: {reason}")]
    IntegratorStep { t_us: f64, reason: String },

    #[error("non-finite amplitudes encountered in {0}")]
    NonFinite(&'static str),

    #[error("jump channel has zero weight")]
    InvalidJump,

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("trajectory {index} failed: {source}")]
    Trajectory {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("spectrum point delta = {delta_rad_per_us} rad/us failed: {source}")]
    SpectrumPoint {
        delta_rad_per_us: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
