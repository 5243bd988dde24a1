#![allow(clippy::result_large_err)]

//! Higher-order network models as presheaves over small indexing categories.
//!
//! Graphs, hypergraphs, (semi-)simplicial sets and their relatives are all
//! presheaves `I^op -> Set` for a suitable indexing category `I`. Changing
//! the model is restriction or Kan extension along a functor between
//! indexing categories.

pub mod error;
pub mod finite_category;
pub mod io;
pub mod kan;
pub mod models;
pub mod presheaf;

pub use error::{Error, Result};
pub use finite_category::{CategoryTag, FiniteCategory, IndexingCategory, MorphismId, ObjectId};
pub use io::{load_model, save_model, AnyModel, ModelKind};
pub use kan::{left_kan, restrict, right_kan, ModelFunctor};
pub use presheaf::{CellId, Presheaf, PresheafMorphism, ValidationReport};
