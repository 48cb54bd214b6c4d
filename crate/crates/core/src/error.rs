use thiserror::Error;

/// Errors raised when constructing or transforming values.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge {{{0}, {1}}} is not present")]
    MissingEdge(usize, usize),

    #[error("arity must be at least {min}, got {got}")]
    ArityTooSmall { min: usize, got: usize },

    #[error("graph must be loopless")]
    HasLoops,

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("invalid condition: {0}")]
    InvalidCondition(String),

    #[error("invalid CSP instance: {0}")]
    InvalidInstance(String),

    #[error("invalid gadget: {0}")]
    InvalidGadget(String),

    /// A configured size cap was exceeded; `estimate` is the size that would have been built.
    #[error("resource guard: {what} would be {estimate}, cap is {cap}")]
    ResourceGuard { what: &'static str, estimate: u128, cap: u128 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Check `estimate <= cap`, producing a [`Error::ResourceGuard`] otherwise.
pub(crate) fn guard(what: &'static str, estimate: u128, cap: u128) -> Result<()> {
    if estimate > cap {
        Err(Error::ResourceGuard { what, estimate, cap })
    } else {
        Ok(())
    }
}
