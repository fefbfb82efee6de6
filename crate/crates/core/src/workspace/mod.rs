//! Rectangular workspaces partitioned into `2^d` cells ordered along a
//! z-order curve, and occupancy bitsets over those cells.

mod bitset;
mod grid;

use thiserror::Error;

pub use bitset::{OccupancyBitset, MAX_BITSET_DEPTH};
pub use grid::{
    cell_bounds, rasterize_box, z_index, z_index_tree_descent, AaBox, GridDocument, GridSpec,
    ZIndex,
};

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("point {0:?} lies outside the workspace")]
    OutOfBounds(Vec<f64>),
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("box does not overlap the workspace")]
    BoxOutside,
    #[error("bitset grids differ: {0:?} vs {1:?}")]
    GridMismatch((u32, u32), (u32, u32)),
    #[error("cell index {0} out of range")]
    IndexOutOfRange(u64),
    #[error("depth {0} too large for a dense bitset (max {MAX_BITSET_DEPTH})")]
    TooDeep(u32),
    #[error("bad bitset file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
