use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation `{op}` is not supported for space kind `{kind}`")]
    UnsupportedKind { op: &'static str, kind: String },

    #[error("norm is not absolute: property ({property}) fails at {counterexample:?}")]
    NotAbsolute {
        property: char,
        counterexample: Vec<f64>,
    },

    #[error("orthogonality fails for pair (a[{a_index}], b[{b_index}]): {reason}")]
    Orthogonality {
        a_index: usize,
        b_index: usize,
        reason: String,
    },

    #[error("invalid polytope: {0}")]
    Polytope(String),

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error("malformed descriptor: {0}")]
    Descriptor(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
