use thiserror::Error;

/// Errors produced by the model evaluations, samplers and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the domain where a closed-form quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A state with zero total jump rate was asked to jump or to report a holding time.
    #[error("absorbing state: zero scattering rate at k = {k}, branch {branch}")]
    AbsorbingState { k: f64, branch: u8 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Not enough data for a statistical procedure (too few exceedances, usable frequencies, ...).
    #[error("statistical precondition failed: {0}")]
    Statistical(String),

    /// Step counts, domain sizes or similar guards tripped.
    #[error("numerical guard: {0}")]
    NumericalGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
