//! Learning edges and triangles of a simplicial complex jointly from node and
//! edge signals.
//!
//! The candidate complex on `n0` nodes holds every edge and triangle; a
//! [`Selection`] switches them on. [`learners::learn_joint`] solves the binary
//! program that picks the smoothest complex meeting cardinality bounds, and
//! the hierarchical and greedy learners are the sequential baselines.

pub mod blp;
pub mod complex;
pub mod datagen;
pub mod error;
pub mod harness;
pub mod learners;
pub mod matrix;
pub mod smoothness;

pub use complex::{CandidateComplex, Selection, SelectionRecord};
pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use smoothness::{CostVectors, TriangleMeasure};
