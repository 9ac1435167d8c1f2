use thiserror::Error;

/// Errors raised by the algebraic layers (cyclotomic arithmetic, abelian
/// groups, tori).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cyclotomic level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),

    #[error("level {from} does not divide target level {to}")]
    NonDivisibleLevel { from: u64, to: u64 },

    #[error("level must be positive")]
    ZeroLevel,

    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),

    #[error("element or character does not belong to the group {0}")]
    ParentMismatch(String),

    #[error("homomorphism is not well defined: {0}")]
    IllDefinedHom(String),

    #[error("enumeration of {size} items exceeds budget {budget}")]
    BudgetExceeded { size: u128, budget: u128 },

    #[error("permutation {0:?} is incompatible with the group moduli")]
    IncompatiblePermutation(Vec<usize>),

    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),

    #[error("rank n must be at least 1")]
    InvalidRank,

    #[error("invalid level {level} for torus {torus}")]
    InvalidLevel { torus: String, level: u64 },

    #[error("{0} overflows 64-bit arithmetic")]
    Overflow(String),

    #[error("group specs differ: {0} vs {1}")]
    SpecMismatch(String, String),

    #[error("invalid partition string {0:?}")]
    BadPartition(String),

    #[error("division by zero")]
    DivisionByZero,
}

pub type Result<T> = std::result::Result<T, Error>;
