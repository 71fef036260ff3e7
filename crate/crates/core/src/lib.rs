//! Construction engine for near-perfect clique tilings of dense graphs,
//! bag-avoiding repair under red-edge insertion, and families of partial
//! partitions of `[n]` that stay pairwise far apart.
//!
//! The constructive algorithms live in [`tiling`], [`repair`] and
//! [`papartition`]; [`oracle`] holds independent brute-force verifiers and
//! exhaustive fallback constructors that act as ground truth at small
//! scale. [`wreath`] is a search explorer for decompositions of all
//! k-subsets into wreaths. All text and JSON file formats are in [`io`].

pub mod compound;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod papartition;
pub mod repair;
pub mod tiling;
pub mod wreath;

pub use graph::{
    check_degree_conditions, random_dense_instance, ConditionReport, Graph, Params,
    TwoColoredInstance,
};
pub use oracle::Report;
pub use papartition::Papartition;
pub use tiling::{Class, Decomposition};
