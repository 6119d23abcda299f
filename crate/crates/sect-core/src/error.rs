//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape has no foreground pixels")]
    EmptyShape,

    #[error("shape exceeds ball: {0}")]
    ShapeExceedsBall(String),

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("group {group} has {size} member(s); the within-group loss needs at least 2 per group")]
    DegenerateGroup { group: u8, size: usize },

    #[error(
        "alpha * permutations = {product} leaves no threshold index below it; \
         increase the permutation count"
    )]
    DegenerateThreshold { product: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Wraps an error with the path of the file it came from.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
