use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("agent {agent} has an infinite bound; gridding needs finite bounds")]
    InfiniteBound { agent: usize },

    #[error("profile outside the evaluable domain: {0}")]
    DomainViolation(String),

    #[error("agent {agent}: negative cycle {cycle:?} of weight {weight}")]
    NegativeCycle {
        agent: usize,
        /// Any grid profile carrying the offending opponents' types.
        profile: usize,
        cycle: Vec<usize>,
        weight: f64,
    },

    #[error("difference vector is not realisable by two in-box columns")]
    Unrepresentable,

    #[error("cannot calibrate offsets{}: {reason}", alternative.map(|a| alloc::format!(" for alternative {a}")).unwrap_or_default())]
    NotCalibratable {
        alternative: Option<usize>,
        reason: String,
    },

    #[error("agents' grids differ: {0}")]
    BoxMismatch(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("linear program: {0}")]
    Solver(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::DomainViolation(msg.into())
    }
}
