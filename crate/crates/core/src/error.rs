use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("layout does not match lattice: {0}")]
    LayoutMismatch(String),

    #[error("degenerate edge: both endpoints at ({x}, {y})")]
    DegenerateEdge { x: f64, y: f64 },

    #[error("node {node} lies on edge {lower}-{upper} (conflict distance 0)")]
    Singular { node: usize, lower: usize, upper: usize },

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
