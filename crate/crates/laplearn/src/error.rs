//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by graph construction, penalties, sampling, solving and
/// data ingestion.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A node count below the two-node minimum.
    #[error("node count p must be at least 2 (got {0})")]
    InvalidNodeCount(usize),

    /// An (i, j) node pair outside the strict lower triangle.
    #[error("edge ({i}, {j}) is out of range for p = {p}; need 1 <= j < i <= p")]
    EdgeOutOfRange { i: usize, j: usize, p: usize },

    /// An edge index outside 1..=p(p-1)/2.
    #[error("edge index {k} is out of range for p = {p}; need 1 <= k <= {max}")]
    EdgeIndexOutOfRange { k: usize, p: usize, max: usize },

    /// A vector whose length does not match the edge count of a p-node graph.
    #[error("vector length {got} does not match the {expected} candidate edges of a {p}-node graph")]
    LengthMismatch { got: usize, expected: usize, p: usize },

    /// A matrix argument with mismatched row/column counts.
    #[error("matrix must be square (got {rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },

    /// Dimension disagreement between two related arguments.
    #[error("{what}: got dimension {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    /// A negative entry where a nonnegative weight is required.
    #[error("weight {value} at position {index} is negative")]
    NegativeWeight { index: usize, value: f64 },

    /// A NaN or infinite entry in numeric input.
    #[error("{what} contains the non-finite value {value} at position {index}")]
    NonFinite {
        what: &'static str,
        index: usize,
        value: f64,
    },

    /// A scalar argument that must be nonzero.
    #[error("{what} must be nonzero")]
    ZeroArgument { what: &'static str },

    /// A scalar argument that must be strictly positive.
    #[error("{what} must be strictly positive (got {value})")]
    NonPositive { what: &'static str, value: f64 },

    /// A negative regularization level.
    #[error("lambda must be nonnegative (got {0})")]
    NegativeLambda(f64),

    /// A concavity parameter below the minimum required by the penalty kind.
    #[error("{kind} requires gamma > {min} (got {gamma})")]
    InvalidGamma {
        kind: &'static str,
        gamma: f64,
        min: f64,
    },

    /// An unrecognized penalty name in configuration input.
    #[error("unknown penalty kind {0:?}; expected \"l1\", \"mcp\" or \"scad\"")]
    UnknownPenaltyKind(String),

    /// An unrecognized initial-point strategy name.
    #[error("unknown initial-point strategy {0:?}; expected \"star\", \"mst\" or \"dense\"")]
    UnknownInitStrategy(String),

    /// An unrecognized data orientation name.
    #[error("unknown orientation {0:?}; expected \"rows-are-variables\" or \"rows-are-observations\"")]
    UnknownOrientation(String),

    /// An unrecognized convergence status name.
    #[error("unknown status {0:?}; expected \"converged\", \"max_iter\", or \"numerical_failure\"")]
    UnknownStatus(String),

    /// A penalty derivative evaluated at a negative point.
    #[error("penalty derivatives are defined on x >= 0 only (got {0})")]
    NegativePenaltyInput(f64),

    /// An empty or inverted weight sampling interval.
    #[error("invalid weight range [{lo}, {hi}]; need 0 < lo <= hi")]
    InvalidWeightRange { lo: f64, hi: f64 },

    /// A probability parameter outside [0, 1].
    #[error("{what} must lie in [0, 1] (got {value})")]
    InvalidProbability { what: &'static str, value: f64 },

    /// More modules than nodes in the modular generator.
    #[error("cannot split {p} nodes into {n_modules} modules")]
    TooManyModules { n_modules: usize, p: usize },

    /// A sample count of zero.
    #[error("sample count must be at least 1")]
    ZeroSamples,

    /// A variable with zero variance on the correlation path.
    #[error("row {0} has zero variance; correlation is undefined")]
    ZeroVarianceRow(usize),

    /// Ground-truth weights whose graph is not connected.
    #[error("the weighted graph is not connected (Lw + J is not positive definite)")]
    DisconnectedGraph,

    /// A symmetric factorization failure on a matrix expected to be positive
    /// definite.
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    /// A solver query at a point outside the feasible set.
    #[error("iterate is infeasible: Lw + J has no Cholesky factorization")]
    InfeasibleIterate { w: Vec<f64> },

    /// A solve started from an infeasible initial point.
    #[error("initial point is infeasible; it must describe a connected graph")]
    InfeasibleInitialPoint,

    /// The maximum-spanning-tree initial point requested without a matrix.
    #[error("the mst initial-point strategy needs a covariance-like matrix")]
    MissingCovariance,

    /// A ground-truth graph with no edges at all.
    #[error("true graph has zero Laplacian; relative error is undefined")]
    ZeroTrueGraph,

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// CSV-level parse failure.
    #[error(transparent)]
    Csv(#[from] csv::Error),

    /// A CSV cell that does not parse as a number.
    #[error("row {row}, column {col}: cannot parse {token:?} as a number")]
    NonNumericField {
        row: usize,
        col: usize,
        token: String,
    },

    /// A CSV cell holding NaN or an infinity.
    #[error("row {row}, column {col}: non-finite value")]
    NonFiniteField { row: usize, col: usize },

    /// A CSV row whose width differs from the first data row.
    #[error("row {row} has {got} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },

    /// A CSV file with no data rows.
    #[error("input contains no data rows")]
    EmptyMatrix,

    /// The same edge listed twice in an edge-list file.
    #[error("edge ({i}, {j}) appears more than once")]
    DuplicateEdge { i: usize, j: usize },
}
