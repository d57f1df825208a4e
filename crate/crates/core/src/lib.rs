//! Constructive approximate Carathéodory sparsification and the solvers built on it.

pub mod caratheodory;
pub mod convex;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod lower_bound;
pub mod lp;
pub mod nash;
pub mod subgraph;

pub use error::{Error, Result};
