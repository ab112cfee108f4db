use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid cell spec: {0}")]
    InvalidSpec(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("window is disconnected ({reached} of {total} vertices reachable)")]
    Disconnected { reached: usize, total: usize },

    #[error("vertex {0} is not in the window")]
    VertexNotInWindow(String),

    #[error("flip-set catalog has {size} sets, above the cap of {cap}")]
    CatalogCap { size: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("assignment does not cover {0}")]
    IncompleteAssignment(String),

    #[error("region has {size} vertices, above the cap of {cap}")]
    RegionCap { size: usize, cap: usize },

    #[error("result carries no checkpoint")]
    MissingCheckpoint,

    #[error("event log verbosity is too low: {0}")]
    InsufficientVerbosity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
