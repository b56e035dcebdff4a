use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ring descriptor: {0}")]
    InvalidRing(String),

    #[error("{0} is not a unit")]
    NotAUnit(String),

    #[error("{0} is not in W_A (a and a-1 must both be units)")]
    NotInW(String),

    #[error("ill-defined homomorphism: {0}")]
    IllDefined(String),

    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    SizeCap { what: String, needed: usize, cap: usize },

    #[error("vector is not in the image lattice")]
    NotInImage,

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
