use thiserror::Error;

/// Errors raised by the library. Negative verdicts (non-monotone sets,
/// infeasible potentials) are *not* errors; they are returned as values
/// carrying a certificate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed cost: a cost value of -inf was supplied")]
    NegInfCost,

    #[error("mixed-infinity addition (+inf) + (-inf) is undefined")]
    MixedInfinity,

    #[error("NaN is not a valid extended real")]
    NaN,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("polar cost is one-dimensional, got points of dimension {0}")]
    PolarDimension(usize),

    #[error("point coordinates must be finite")]
    NonFinitePoint,

    #[error("invalid cost specification: {0}")]
    InvalidCost(String),

    #[error("index {index} out of range for {len} pairs")]
    IndexOutOfRange { index: usize, len: usize },

    #[error(
        "pair {index} has infinite cost c(x, y) = +inf; every pair of the coupling set \
         must have finite cost (membership condition of cyclic monotonicity and path-boundedness)"
    )]
    InfiniteDiagonal { index: usize },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("instance too large for exhaustive enumeration: {size} pairs, limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("operation requires the polar cost, got {0}")]
    WrongKernel(&'static str),

    #[error("point coordinates must be positive for the antitone criterion (pair {0})")]
    NonPositivePoint(usize),

    #[error("operation requires a feasible potential")]
    Infeasible,

    #[error("operation requires point coordinates; the matrix cost indexes abstract pairs only")]
    NeedsPoints,

    #[error(
        "classical construction undefined: crossed cost c(x_{to}, y_{from}) is +inf, \
         the chain formula cannot be evaluated for non-traditional costs"
    )]
    ClassicalUndefined { from: usize, to: usize },

    #[error("classical construction requires a cyclically monotone set (positive cycle {0:?})")]
    NotMonotone(Vec<usize>),

    #[error("min_edges must be 1 or 2, got {0}")]
    MinEdges(u8),

    #[error("c-transform over an empty grid")]
    EmptyGrid,

    #[error("grid and potential lengths differ: {0} vs {1}")]
    GridMismatch(usize, usize),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("invalid family parameters: {0}")]
    FamilyParams(String),

    #[error("graph is not acyclic (cycle through vertex {0})")]
    Cyclic(usize),

    #[error("vertex {vertex} violates the balance bound: |in - out| = {imbalance} > epsilon = {epsilon}")]
    Unbalanced {
        vertex: usize,
        imbalance: String,
        epsilon: String,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

pub type Result<T> = std::result::Result<T, Error>;
