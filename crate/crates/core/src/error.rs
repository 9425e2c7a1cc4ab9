use thiserror::Error;

use crate::lang::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("language `{language}`: beliefs are contradictory, no model survives")]
    Contradiction { language: String },

    #[error("language `{language}` has {atoms} elementary propositions; the enumeration cap is {cap}")]
    TooManyAtoms {
        language: String,
        atoms: usize,
        cap: usize,
    },

    #[error("language `{language}` has {models} models; at most {cap} are supported")]
    TooManyModels {
        language: String,
        models: usize,
        cap: usize,
    },

    #[error("the extra top element has no negation")]
    NegateStar,

    #[error("{operation} is undefined for the extra top element")]
    StarArgument { operation: String },

    #[error("operands belong to different algebras (`{left}` and `{right}`)")]
    CrossAlgebra { left: String, right: String },

    #[error("value does not belong to algebra `{algebra}`")]
    OutOfRange { algebra: String },

    #[error("malformed translation: {0}")]
    MalformedTranslation(String),

    #[error("inconsistent input: {axiom} fails")]
    Inconsistent { axiom: String },

    #[error("malformed joint state space: {0}")]
    MalformedStateSpace(String),

    #[error("probability distribution is not normalized (total {total})")]
    NotNormalized { total: f64 },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("characterization mismatch at {witness}")]
    CharacterizationMismatch { witness: String },

    #[error("only the bottom element would be common; the common language is degenerate")]
    DegenerateCommonLanguage,

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("{path}: {message}")]
    File { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
