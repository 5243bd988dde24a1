use thiserror::Error;

use crate::finite_category::{CategoryTag, MorphismId, ObjectId};
use crate::presheaf::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("object {object} is not in {tag} (truncation {truncation})")]
    UnknownObject { tag: CategoryTag, truncation: usize, object: ObjectId },

    #[error("{morphism} is not a morphism of {tag}")]
    InvalidMorphism { tag: CategoryTag, morphism: MorphismId },

    #[error("cannot compose {g} after {f}: target of f is not the source of g")]
    NotComposable { g: MorphismId, f: MorphismId },

    #[error("enumeration budget of {budget} exceeded (search-space bound {bound})")]
    BudgetExceeded { budget: u64, bound: String },

    #[error("level {level} exceeds truncation {truncation}")]
    TruncationOverflow { level: usize, truncation: usize },

    #[error("index categories differ: {0}")]
    CategoryMismatch(String),

    #[error("malformed presheaf: {0}")]
    Malformed(String),

    #[error("invalid presheaf: {0}")]
    Invalid(ValidationReport),

    #[error("not a functor: {0}")]
    NotAFunctor(String),

    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),

    #[error("empty group or tuple")]
    EmptyTuple,

    #[error("relation is not closed under subsets: {member:?} is present but {missing:?} is not")]
    NotSubsetClosed { member: Vec<String>, missing: Vec<String> },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("{0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
