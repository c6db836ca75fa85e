use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bit string length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("cap exceeded for {what}: requested {requested}, limit {limit}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A player emitted an output outside its structural domain
    /// (e.g. a pair not in Bob's matching, or a string outside Alice's coset).
    #[error("structurally invalid output: {0}")]
    InvalidOutput(String),

    #[error("game has no exact enumerator: {0}")]
    MissingEnumerator(String),

    #[error("degenerate functional: all entries are equal, no affine rescaling exists")]
    DegenerateFunctional,

    #[error("basis is not orthonormal: {0}")]
    NonOrthonormalBasis(String),

    #[error("value {value} exceeds registered bound {bound} beyond tolerance")]
    BoundViolation { value: f64, bound: f64 },

    #[error("partition does not cover the cube exactly: {0}")]
    PartitionNotCovering(String),

    #[error("config error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 0 ok, 2 schema, 3 runtime cap,
    /// 4 invariant/bound violation, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::InvalidParameter(_) => 2,
            Error::CapExceeded { .. } | Error::MissingEnumerator(_) => 3,
            Error::BoundViolation { .. } | Error::NonOrthonormalBasis(_) => 4,
            _ => 1,
        }
    }
}
