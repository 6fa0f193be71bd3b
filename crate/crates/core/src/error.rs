use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The closed-form minimum distance (and every bound built on it) only holds
    /// while the superimposed constellation does not overlap.
    #[error("alpha = {alpha} exceeds the non-overlap threshold alpha* = {alpha_star} for (M1, M2) = ({m1}, {m2})")]
    OutOfRegime {
        alpha: f64,
        alpha_star: f64,
        m1: u32,
        m2: u32,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
