//! Transition labeling as a sparse × dense boolean matrix product.
//!
//! Rows of the sparse matrix are the voxelized swept volumes of the
//! transitions, stored CSR; columns of the dense matrix are proposition
//! occupancy bitsets. Entry `(i, j)` of the product is set iff transition
//! `i` touches a voxel of proposition `j`.

mod apply;
mod csr;
mod engine;
mod io;

use thiserror::Error;

pub use apply::{apply_labels, LabeledEdge, LabeledSystem};
pub use csr::{ColIndex, CsrBoolMatrix};
pub use engine::{
    label_all, label_edge_counting, DensePropMatrix, LabelEngine, LabelMatrix, ScanStats,
    SCAN_CHUNK,
};

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    #[error("malformed CSR matrix: {0}")]
    MalformedCsr(String),
    #[error("column index {0} does not fit the index type")]
    IndexOverflow(u64),
    #[error("at most 64 propositions are supported, got {0}")]
    TooManyPropositions(usize),
    #[error("bad file: {0}")]
    Format(String),
    #[error(transparent)]
    Workspace(#[from] crate::workspace::WorkspaceError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn mismatch(left: impl std::fmt::Display, right: impl std::fmt::Display) -> LabelError {
    LabelError::DimensionMismatch {
        left: left.to_string(),
        right: right.to_string(),
    }
}
