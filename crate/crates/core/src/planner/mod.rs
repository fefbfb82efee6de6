//! Product of a labeled transition system with a safety monitor, and
//! minimum-cost planning over it.

mod demo;
mod product;
mod search;

use thiserror::Error;

pub use demo::{lane_change_instance, SPLIT_LANE_FORMULA};
pub use product::{
    build_product, check_trace, LabelProjection, ProductEdge, ProductGraph, ProductVertex,
};
pub use search::{shortest_safe_path, Path, PathDocument, PathStep};

#[derive(Debug, Error, PartialEq)]
pub enum PlannerError {
    #[error("vertex {0} is not in the transition system")]
    UnknownVertex(usize),
    #[error("monitor proposition `{0}` is not labeled in the transition system")]
    AlphabetMismatch(String),
    #[error("edge {edge} has negative weight {weight}")]
    NegativeWeight { edge: usize, weight: f64 },
    #[error("trace step {index} ({from} -> {to}) is not an edge")]
    NonEdge {
        index: usize,
        from: usize,
        to: usize,
    },
}
