//! Simulated labeling workloads: a vehicle circling a loop among other
//! agents, a timing harness for the labeling engine, and a Monte-Carlo
//! model of early termination.

mod bernoulli;
mod presets;
mod scenario;
mod timing;

use thiserror::Error;

pub use bernoulli::{bernoulli_experiment, predicted_examined, BernoulliResult};
pub use presets::{bench_abstraction_config, bench_grid, preset_matrices, REFERENCE_SIZES};
pub use scenario::{generate_scenario, Scenario, ScenarioConfig, MOVING_VEHICLE, NOT_NOMINAL_LANE};
pub use timing::{
    fit_scaling, run_benchmark, run_benchmark_matrices, BenchConfig, BenchReport, BenchRow,
    LinearFit,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("agent {0} leaves the workspace")]
    AgentOutside(usize),
    #[error("probabilities must lie in (0, 1], got p_mot={p_mot}, p_pred={p_pred}")]
    Probability { p_mot: f64, p_pred: f64 },
    #[error("need at least {needed} points for a fit, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("grid and preset disagree: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Workspace(#[from] crate::workspace::WorkspaceError),
    #[error(transparent)]
    Abstraction(#[from] crate::abstraction::AbstractionError),
    #[error(transparent)]
    Label(#[from] crate::label::LabelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
