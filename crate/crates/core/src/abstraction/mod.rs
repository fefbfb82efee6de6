//! Discrete abstraction of vehicle motion: single-track dynamics, footprint
//! sweeps through the time-augmented workspace, and roadmap construction.

mod dynamics;
mod footprint;
mod io;
mod system;

use thiserror::Error;

pub use dynamics::{
    edge_cost, edge_cost_with, integrate_bicycle, integrate_constant, ControlInput, ControlSegment,
    State5, Trajectory, VehicleParams,
};
pub use footprint::{footprint_polygon, sweep_cells, sweep_voxelize, FootprintSpec, OrientedRect};
pub use system::{
    build_abstraction, translate_system, AbstractionConfig, Displacement, Edge, StateScale,
    TargetSampling, TransitionSystem,
};

#[derive(Debug, Error)]
pub enum AbstractionError {
    #[error("control (steer {steer}, accel {accel}) exceeds limits (|steer| <= {max_steer}, |accel| <= {max_accel})")]
    ControlBounds {
        steer: f64,
        accel: f64,
        max_steer: f64,
        max_accel: f64,
    },
    #[error("invalid integration step {0}")]
    InvalidStep(f64),
    #[error("bad control schedule: {0}")]
    Schedule(String),
    #[error("invalid footprint: {0}")]
    Footprint(String),
    #[error("sweeps need a 3-axis grid, got {0} axes")]
    GridDims(usize),
    #[error("state {0:?} lies outside the workspace")]
    ExitsWorkspace([f64; 5]),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
    #[error("malformed transition system: {0}")]
    Malformed(String),
    #[error("edge {edge} ends {error} (normalized) away from its target vertex")]
    EndpointMismatch { edge: usize, error: f64 },
    #[error("bad file: {0}")]
    Format(String),
    #[error(transparent)]
    Workspace(#[from] crate::workspace::WorkspaceError),
    #[error(transparent)]
    Label(#[from] crate::label::LabelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
