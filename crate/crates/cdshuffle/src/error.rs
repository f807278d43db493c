use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation received an empty playlist or an empty sequence where at
    /// least one element is required.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A shuffle configuration field is out of range or a kind string is
    /// unknown.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A numeric parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A size argument (group size, matrix dimension, padding length) is
    /// invalid for the operation.
    #[error("invalid size: {0}")]
    Size(String),

    /// A playlist or group violates a structural invariant.
    #[error("invalid playlist: {0}")]
    Playlist(String),

    /// An alter state does not describe the playlist it is applied to.
    #[error("alter state mismatch: {0}")]
    StateMismatch(String),

    /// A positioned item carries a NaN or infinite position.
    #[error("non-finite position for item {0}")]
    NonFinitePosition(String),

    /// A k-way merge input group is not sorted ascending by position.
    #[error("merge input group {0} is not sorted by position")]
    UnsortedGroup(usize),

    /// A matrix handed to the eigensolver is not Hermitian within tolerance.
    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),

    /// The eigenvalue iteration did not converge within the sweep budget.
    #[error("eigenvalue iteration exceeded {0} sweeps without converging")]
    NoConvergence(usize),

    /// An evaluation point lies outside a density's documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A histogram operation needs at least one bin or one recorded sample.
    #[error("empty histogram: {0}")]
    EmptyHistogram(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
