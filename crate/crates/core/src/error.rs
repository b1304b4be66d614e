use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation would exceed one of the configured budgets.
    #[error("resource limit exceeded: {what} requires {requested}, budget is {budget}")]
    Resource {
        what: &'static str,
        requested: u64,
        budget: u64,
    },

    /// A parameter relation required by the construction does not hold.
    #[error("parameter condition violated: {0}")]
    Condition(String),

    /// The product of primes up to the bound does not fit in 64 bits.
    #[error("primorial overflows u64 at prime {prime}")]
    PrimorialOverflow { prime: u64 },

    /// A shift and a mirrored shift coincide.
    #[error("mirror collision: offset {h} equals N - {h_mirror}")]
    MirrorCollision { h: i64, h_mirror: i64 },

    /// A post-condition failed; indicates a bug or a numerical breakdown.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn condition(msg: impl Into<String>) -> Self {
        Error::Condition(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
