//! Equitable, parity and degree-bounded factorizations of loopful multigraphs.

pub mod bipartite;
pub mod characterization;
pub mod connectivity;
pub mod degree_bounded;
pub mod equitable;
pub mod error;
pub mod factorization;
mod flow;
pub mod graph;
pub mod harness;
mod matroid;
pub mod orientation;
pub mod parity_epsilon;
pub mod split;

pub use error::{Error, Preconditions, Result};
pub use factorization::Factorization;
pub use graph::{Multigraph, Orientation, SplitGraph, VSet};
