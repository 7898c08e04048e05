use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates the documented preconditions.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A point lies outside the region where a patch quantity is defined.
    #[error("outside patch {patch:?}: {detail}")]
    OutsidePatch {
        patch: crate::gauge_field::Patch,
        detail: String,
    },

    /// The quantity is undefined at this configuration (monopole, pole, origin on a facet...).
    #[error("singular configuration: {0}")]
    Singular(String),

    /// A quadrature or solver failed its own convergence check.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
