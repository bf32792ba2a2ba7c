use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch in {op}: {lhs} vs {rhs}")]
    DimensionMismatch {
        op: &'static str,
        lhs: String,
        rhs: String,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (first violation at ({i},{j}))")]
    NotSymmetric { i: usize, j: usize },

    #[error("matrix is not self-adjoint (first violation at ({i},{j}))")]
    NotSelfAdjoint { i: usize, j: usize },

    #[error("matrix is not positive semidefinite ({negatives} negative eigenvalues)")]
    NotPsd { negatives: usize },

    #[error("invalid quotient schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),

    #[error("element does not belong to the group: {0}")]
    ElementOutsideGroup(String),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("{0} is only supported for free abelian groups")]
    NotFreeAbelian(&'static str),

    #[error("empty interval or reversed endpoints: ({a}, {b}]")]
    BadInterval { a: String, b: String },

    #[error("degree {p} out of range 0..={top}")]
    DegreeOutOfRange { p: usize, top: usize },

    #[error("chain complex validation failed: {0}")]
    InvalidComplex(String),

    #[error("filter parameter out of range: {0}")]
    FilterParameter(String),

    #[error("filter constraints unverifiable within degree cap {cap}: {detail}")]
    FilterConstruction { cap: usize, detail: String },

    #[error("matrix has non-integer coefficients (entry ({i},{j}))")]
    NonIntegerCoefficients { i: usize, j: usize },

    #[error("equivariant complex validation failed: {0}")]
    InvalidCover(String),

    #[error("exhaustion is invalid: {0}")]
    InvalidExhaustion(String),

    #[error("oracle did not converge within {limit} refinements (last delta {delta})")]
    OracleNonConvergent { limit: usize, delta: f64 },

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("cannot parse rational {0:?}")]
    BadRational(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
