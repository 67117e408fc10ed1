use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid instance: {0}")]
    Semantic(String),
    #[error("walk is not closed")]
    NotClosed,
    #[error("arc multiset is not balanced at vertex {0}")]
    NotBalanced(usize),
    #[error("support of the arc multiset is not weakly connected")]
    NotConnected,
    #[error("anchor vertex {0} is not on the support")]
    AnchorOffSupport(usize),
    #[error("capacities are too tight for the capacity-free solver")]
    CapacityTooTight,
    #[error("search space too large: {0}")]
    TooLarge(String),
    #[error("too many traversals: {0}")]
    TooMany(String),
    #[error("skeleton guess admits no program: {0}")]
    InfeasibleGuess(String),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid capacitated dominating set witness: {0}")]
    InvalidCdsWitness(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
