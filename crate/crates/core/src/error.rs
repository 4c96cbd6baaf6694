use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an operation's inputs was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// An array's shape does not match what the polymatroid demands.
    /// Distinct from a verification failure on a well-shaped array.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The requested structure is known not to exist.
    #[error("nonexistence: {0}")]
    Nonexistence(String),

    /// The structure may exist but no construction is implemented here.
    #[error("no construction available: {0}")]
    Capability(String),

    /// Malformed textual input (expressions, array files, names).
    #[error("parse error: {0}")]
    Parse(String),

    /// A witness was requested for a point not classified entropic.
    #[error("witness requested for a point not classified entropic: {0}")]
    NotEntropic(String),

    /// The point is entropic but no exact finitely-supported witness could be
    /// assembled within the configured bounds.
    #[error("no exact witness within bounds: {0}")]
    WitnessUnavailable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
