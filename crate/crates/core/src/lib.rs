//! Labeling of motion-planning abstractions with atomic propositions via
//! voxelized swept volumes and sparse boolean matrix products, plus LTL
//! safety monitors and product-graph planning over the labeled result.

// `!(a > b)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abstraction;
pub mod bench;
pub mod buchi;
pub mod label;
pub mod ltl;
pub mod planner;
pub mod scalar;
pub mod workspace;

pub use scalar::Real;

/// Double-precision instantiations of the geometric types.
pub mod f64 {
    pub type GridSpec = crate::workspace::GridSpec<f64>;
    pub type AaBox = crate::workspace::AaBox<f64>;
    pub type State5 = crate::abstraction::State5<f64>;
    pub type Trajectory = crate::abstraction::Trajectory<f64>;
    pub type FootprintSpec = crate::abstraction::FootprintSpec<f64>;
    pub type TransitionSystem = crate::abstraction::TransitionSystem<f64>;
    pub type AbstractionConfig = crate::abstraction::AbstractionConfig<f64>;
    pub type LabeledSystem = crate::label::LabeledSystem<f64>;
    pub type ProductGraph = crate::planner::ProductGraph<f64>;
    pub type Path = crate::planner::Path<f64>;
}

/// Single-precision instantiations of the geometric types.
pub mod f32 {
    pub type GridSpec = crate::workspace::GridSpec<f32>;
    pub type AaBox = crate::workspace::AaBox<f32>;
    pub type State5 = crate::abstraction::State5<f32>;
    pub type Trajectory = crate::abstraction::Trajectory<f32>;
    pub type FootprintSpec = crate::abstraction::FootprintSpec<f32>;
    pub type TransitionSystem = crate::abstraction::TransitionSystem<f32>;
    pub type AbstractionConfig = crate::abstraction::AbstractionConfig<f32>;
    pub type LabeledSystem = crate::label::LabeledSystem<f32>;
    pub type ProductGraph = crate::planner::ProductGraph<f32>;
    pub type Path = crate::planner::Path<f32>;
}
