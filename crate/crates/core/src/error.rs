use thiserror::Error;

use crate::nec::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid signature: {}", join_violations(.0))]
    InvalidSignature(Vec<Violation>),

    #[error("degenerate signature {0}: normalized area is not positive")]
    DegenerateSignature(String),

    #[error("signature {0} is not of the form (h;-;[m1,...,mr])")]
    UnsupportedSignature(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("elements belong to different groups ({0} vs {1})")]
    SpecMismatch(String, String),

    #[error("malformed element word {word:?} for {group}")]
    MalformedWord { group: String, word: Vec<u32> },

    #[error("group order {0} is above the brute-force limit {1}")]
    OrderTooLarge(usize, usize),

    #[error("element set is not a subgroup")]
    NotASubgroup,

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}
