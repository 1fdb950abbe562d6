use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),
    #[error("deflection angle {0} is outside (-pi/2, pi/2) or folds the middle band")]
    BadAngle(f64),
    #[error("point ({0}, {1}) lies on a field interface")]
    InterfacePoint(f64, f64),
    #[error("element {0} straddles a field interface")]
    StraddlingElement(usize),
    #[error("mesh has no interior nodes")]
    EmptyFreeSpace,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("nodal field is nonzero on boundary node {0}")]
    BoundaryValue(usize),
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("eigensolver did not converge after {iterations} steps; mu_min in [{lower:e}, {upper:e}]")]
    NoConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },
    #[error("descent inconclusive after {iterations} iterations (energy {energy:e})")]
    Inconclusive { iterations: usize, energy: f64 },
    #[error("no sign change of the verdict in [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("profile violates support or symmetry by {0:e}")]
    ProfileViolation(f64),
    #[error("ratio undefined: odd extension has zero seminorm")]
    UndefinedRatio,
    #[error("witness is {0:e} on the boundary")]
    WitnessBoundary(f64),
    #[error("base witness is not negative enough (energy {0:e})")]
    InsufficientMargin(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
