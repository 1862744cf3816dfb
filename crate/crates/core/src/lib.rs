//! Algebraic trees with two-level measures.
//!
//! The crate covers finite algebraic trees and their branch point maps,
//! one- and two-level measures on them, sample shapes and the sample shape
//! distance, the coding of binary trees by polygon triangulations, and the
//! nested Kingman coalescent.

pub mod canon;
pub mod fixtures;
pub mod io;
pub mod kingman;
pub mod measure;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod shape;
pub mod tree;
pub mod triangulation;

pub use report::Report;
pub use scalar::{Rational, Scalar};
pub use tree::{AlgebraicTree, VertexId};
