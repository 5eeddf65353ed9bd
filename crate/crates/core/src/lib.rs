//! Simulation of users migrating from an incumbent social networking site to a
//! newly launched competitor.
//!
//! A user keeps the old site and additionally adopts the new one either
//! spontaneously (non-diffusive shift, probability `p` per day) or because
//! enough of the time their friends spend online has moved to features that
//! only the new site offers (diffusive shift, threshold `epsilon`).
//!
//! All model arithmetic is generic over [`Scalar`], so the same code runs in
//! `f32`, `f64` or exact rational arithmetic. Aliases for the common
//! instantiations live at the crate root.

pub mod analysis;
pub mod cascade;
pub mod cli;
pub mod feature_space;
pub mod graph;
mod scalar;

pub use cascade::{CascadeTrace, NodeState, SimConfig, StepRecord};
pub use feature_space::{FeatureSpace, SurveyRatings};
pub use graph::Graph;
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::Ratio<i64>;

pub type FeatureSpace32 = FeatureSpace<f32>;
pub type FeatureSpace64 = FeatureSpace<f64>;
pub type FeatureSpaceExact = FeatureSpace<Rational>;

pub type SimConfig32 = SimConfig<f32>;
pub type SimConfig64 = SimConfig<f64>;
pub type SimConfigExact = SimConfig<Rational>;
