use thiserror::Error;

/// Errors raised by the library. Every variant is recoverable by the caller;
/// none of them indicates a wrong answer was produced.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("search cap exceeded; certified lower bound {lower_bound}")]
    SearchCapExceeded { lower_bound: u64 },
    #[error("subgroup does not have finite index")]
    NotFiniteIndex,
    #[error("finite quotient or cover exceeds the order cap {cap}")]
    OrderCapExceeded { cap: usize },
    #[error("matrix of size {size} exceeds the cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("dimension {dim} outside 0..={top}")]
    DimensionOutOfRange { dim: usize, top: usize },
    #[error("operation requires a free abelian group")]
    NotAbelian,
    #[error("operation requires the group Z (rank one)")]
    NotRankOne,
    #[error("torus rank {0} outside 1..=4")]
    RankOutOfRange(usize),
    #[error("stripe dimension {q} must be at least {min}")]
    DimensionTooLow { q: usize, min: usize },
    #[error("invalid stripe: {0}")]
    InvalidStripe(String),
    #[error("d_{q} * d_{next} is nonzero at row {row}, column {col}", next = .q + 1)]
    BoundaryNotClosed { q: usize, row: usize, col: usize },
    #[error("z = {0} must lie strictly between 0 and 1")]
    DegenerateZ(f64),
    #[error("spectral gap of size {lambda0} could not be verified")]
    GapNotVerified { lambda0: f64 },
    #[error("lambda {lambda} is not below the gap {lambda0}")]
    LambdaAboveGap { lambda: f64, lambda0: f64 },
    #[error("density hypothesis not verified: {0}")]
    HypothesisUnverified(String),
    #[error("short length {0} is below 3")]
    ShortTooSmall(u64),
    #[error("family is not log-uniform: {0}")]
    FamilyNotLogUniform(String),
    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
