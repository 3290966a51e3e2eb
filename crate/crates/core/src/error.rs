use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too coarse: {nodes:.1} nodes across the smallest feature of {feature} (need at least 4)")]
    GridTooCoarse { feature: String, nodes: f64 },

    #[error("grid does not contain the domain: {0}")]
    GridTooSmall(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value at node ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("reflected point of node ({i}, {j}) falls outside the domain; boundary curvature too high for this thickness")]
    ReflectionOutside { i: usize, j: usize },

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("field is not binary (+1/-1) at node ({i}, {j}): {value}")]
    NonBinary { i: usize, j: usize, value: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
