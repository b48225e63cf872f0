use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("underdetermined system: {directions} directions for {basis} basis functions")]
    Underdetermined { directions: usize, basis: usize },
    #[error("flag violation: {0}")]
    Flag(String),
    #[error("grid too small: axis {axis} has {size} voxels (need 1 or at least 3)")]
    GridTooSmall { axis: usize, size: usize },
    #[error("triangle rule violated for J={big_j}, j={j}, j'={jp}")]
    Triangle { big_j: i32, j: i32, jp: i32 },
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("missing response coefficient for order {0}")]
    MissingCoefficient(usize),
    #[error("numerical divergence at step {step}")]
    Divergence { step: usize },
    #[error("format error: {0}")]
    Format(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
