use thiserror::Error;

/// Errors raised by the design, analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is numerically singular (pivot {pivot} below threshold)")]
    Singular { pivot: usize },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("root set is not closed under complex conjugation")]
    NotConjugateClosed,

    #[error("QR iteration failed to converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("output has no relative degree: C A^(i-1) B vanishes for every i <= n")]
    NoRelativeDegree,

    #[error("uncontrollable system: controllability matrix is singular")]
    Uncontrollable,

    #[error("normal-form transformation is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("polynomial must be monic (leading coefficient {leading})")]
    NotMonic { leading: f64 },

    #[error("polynomial degree {degree} outside the admissible range {min}..={max}")]
    Degree { degree: usize, min: usize, max: usize },

    #[error("design verification failed: {0}")]
    Verification(String),

    #[error("controller order {order} does not match relative degree {relative_degree}")]
    ControllerMismatch { order: usize, relative_degree: usize },

    #[error("invalid controller: {0}")]
    InvalidController(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("no trajectory samples after the transient cut")]
    EmptyTail,

    #[error("least-squares fit is degenerate: {0}")]
    DegenerateFit(String),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("sweep failed at grid value {value:e}: {source}")]
    Sweep { value: f64, source: Box<Error> },
}

impl Error {
    /// True for failures caused by floating-point breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singular { .. }
            | Error::NoConvergence { .. }
            | Error::IllConditioned { .. }
            | Error::Verification(_) => true,
            Error::Sweep { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn dim(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Dimension { op, detail: detail.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
