use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("halfspace normal {0:?} is not a primitive integer vector")]
    NonPrimitiveNormal(Vec<i64>),
    #[error("region is unbounded")]
    UnboundedRegion,
    #[error("region is empty")]
    EmptyRegion,
    #[error("region is not full-dimensional")]
    NotFullDimensional,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {0} is not supported by this operation")]
    UnsupportedDimension(usize),
    #[error("piecewise-linear function has no pieces")]
    NoPieces,
    #[error("test configuration function is positive ({0:e}) on the polytope")]
    PositiveOnPolytope(f64),
    #[error("tau must be finite and non-negative, got {0}")]
    NegativeTau(f64),
    #[error("lambda must be non-positive for this operation, got {0}")]
    PositiveLambda(f64),
    #[error("exponent {0:e} exceeds the representable range")]
    OverflowRisk(f64),
    #[error("symplectic potential is not strictly convex (w = {value:e} at x = {x})")]
    NonConvexPotential { x: f64, value: f64 },
    #[error("Ricci potential requires total area 2, got {0}")]
    WrongNormalization(f64),
    #[error("momentum is not finite at node {0}")]
    NonFiniteMomentum(usize),
    #[error("norm is zero while M_NA is negative: the quadratic is unbounded")]
    NormZero,
    #[error("ray potential lost convexity at t = {t}, x = {x}")]
    ConvexityLoss { t: f64, x: f64 },
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-domain input rather than
    /// by a numerical failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::OverflowRisk(_) | Error::NonConvergence(_) | Error::ConvexityLoss { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
