use thiserror::Error;

use crate::Id;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("bisector is undefined: the first homothet is contained in the second")]
    UndefinedBisector,

    #[error("operation requires a nonempty set")]
    Empty,

    #[error("unknown member id {0}")]
    UnknownId(Id),

    #[error("member {0} was already deleted")]
    AlreadyDeleted(Id),

    #[error("index {index} out of range 1..={len}")]
    OutOfRange { index: usize, len: usize },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("no path with at most {k} hops between {from} and {target} at any critical radius")]
    NoPath { from: Id, target: Id, k: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
