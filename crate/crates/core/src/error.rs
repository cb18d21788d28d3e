use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("need at least two distinct classes to train, found {0}")]
    SingleClass(usize),

    #[error("query vector is zero; route it to the back-off classifier")]
    ZeroQuery,

    #[error("no class bank has any vector")]
    EmptyBanks,

    #[error("{k} folds requested but only {groups} groups available")]
    TooManyFolds { k: usize, groups: usize },

    #[error("length mismatch: {left} gold labels vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },

    #[error("duplicate tweet id `{0}`")]
    DuplicateId(String),

    #[error("invalid identifier: {0}")]
    InvalidId(&'static str),

    #[error("missing input: {0}")]
    MissingInput(&'static str),
}
