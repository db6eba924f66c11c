//! Typed summary graphs for RDF data.
//!
//! The pipeline parses N-Triples into an indexed [`Graph`], weights every
//! entity descriptor with tf-idf, iterates a weighted Jaccard/RoleSim pair
//! similarity to a fixed point, groups entities into type classes under a
//! dissimilarity threshold and finally scores the resulting summary graph.
//! The threshold can be picked automatically by maximizing the
//! favorability score of the summary.

pub mod classes;
pub mod cli;
pub mod error;
pub mod eval;
pub mod export;
pub mod graph;
pub mod naming;
pub mod similarity;
pub mod summary;
pub mod synthetic;
pub mod weights;

pub use classes::{create_classes, ClassId, TypeClassMap};
pub use error::{Error, Result};
pub use graph::{Graph, Node, NodeId, NodeKind, PredId, Triple};
pub use similarity::{run_sim_measure, IterationParams, MatchingMode, SimilarityMatrix};
pub use summary::{FavorabilityReport, SummaryGraph, ThresholdSearchParams};
