use crate::tree::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The input does not describe a rooted tree without interior terminals.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("depth {depth} out of range (allowed {min}..={max})")]
    DepthOutOfRange { depth: usize, min: usize, max: usize },

    #[error("objects live on different trees")]
    TreeMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Exhaustive oracles refuse rather than silently sample.
    #[error("search space too large: {size} exceeds cap {cap}; use a sampling method")]
    SearchCapExceeded { size: u128, cap: u128 },

    /// The weight vanishes at `vertex` while the target value there is
    /// nonzero, so no preimage exists.
    #[error("forced value undefined at vertex {vertex}: weight is 0 but target is {target}")]
    ForcedValue { vertex: VertexId, target: f64 },

    /// Schema or semantic error in a JSON spec, located by JSON pointer.
    #[error("{source_name}: {pointer}: {message}")]
    Load {
        source_name: String,
        pointer: String,
        message: String,
    },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn load(source_name: &str, pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Load {
            source_name: source_name.to_string(),
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
