use alloc::string::String;

use thiserror::Error;

use crate::game::ChoiceId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("complement has an empty winning relation")]
    EmptyComplement,
    #[error("choice {0} occurs in no winning profile")]
    SurelyLosingChoice(ChoiceId),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("stage is already final")]
    StageAlreadyFinal,
    #[error("profile has {got} entries, game has {expected} players")]
    ProfileArityMismatch { expected: usize, got: usize },
    #[error("operation supports two-player games only (got {0} players)")]
    UnsupportedPlayerCount(usize),
    #[error("not a choice matching game")]
    NotAChoiceMatchingGame,
    #[error("stage is final; no move is defined")]
    FinalStage,
    #[error("protocol table has no entry for stage class {0}")]
    TableMiss(String),
    #[error("Markov chain did not close within {0} classes")]
    ChainNotClosed(usize),
    #[error("protocol is not invariant on the chain quotient: {0}")]
    NotSimilarityInvariant(String),
    #[error("coordination is not almost sure under this protocol (singular system)")]
    SingularSystem,
    #[error("closed form requires odd m (got {0})")]
    EvenM(usize),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("fixed-point iteration did not converge within {0} steps")]
    NoConvergence(usize),
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("census is only defined for m = 3 or m = 5 (got {0})")]
    UnsupportedM(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
