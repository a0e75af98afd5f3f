//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0} is not a successor ordinal")]
    NotSuccessor(String),
    #[error("{0} is not a limit ordinal")]
    NotLimit(String),
    #[error("window {requested} exceeds cap {cap}")]
    WindowCap { requested: u32, cap: u32 },
    #[error("support size {size} exceeds cap {cap}")]
    SupportCap { size: usize, cap: usize },
    #[error("empty block in admissible family")]
    EmptyBlock,
    #[error("empty value list")]
    EmptyValues,
    #[error("invalid index map: {0}")]
    IndexMap(String),
    #[error("vector shape does not match space: {0}")]
    ShapeMismatch(String),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("linear program: {0}")]
    Lp(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
