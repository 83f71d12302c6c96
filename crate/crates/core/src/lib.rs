//! K-learning for episodic tabular MDPs and multi-armed bandits.
//!
//! The agent propagates certainty-equivalent values of an
//! epistemic-risk-seeking exponential utility through the Bellman operator
//! of its posterior, and acts with the Boltzmann policy over the resulting
//! K-values. The crate also carries the comparison agents, the experiment
//! environments and a seeded regret harness.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`, which the harness uses throughout.

pub mod baselines;
pub mod belief;
pub mod envs;
mod error;
pub mod harness;
pub mod klearning;
pub mod mdp;
pub mod sampling;
mod scalar;
pub mod softmax;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Mdp = mdp::LayeredMdp<f64>;
pub type Policy = mdp::Policy<f64>;
pub type Table = mdp::Table<f64>;
pub type ValueTables = mdp::ValueTables<f64>;
pub type OccupancyMeasure = mdp::OccupancyMeasure<f64>;
pub type Belief = belief::BeliefState<f64>;
pub type Prior = belief::BeliefPrior<f64>;
pub type KSolution = klearning::KSolution<f64>;
pub type Temperature = klearning::Temperature<f64>;
