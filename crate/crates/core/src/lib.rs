//! Beamforming and trajectory planning for a two-antenna jamming UAV.
//!
//! The jammer steers an exact null onto a friendly client, orients its array for the
//! largest far-field gain toward an eavesdropper, and flies a trajectory that solves
//! the Pontryagin conditions of a jamming-reward / actuation-cost trade-off.
//!
//! Numeric code is generic over [`Scalar`] (`f32`, `f64`); the aliases below fix `f64`.

pub mod beamforming;
pub mod check;
pub mod error;
pub mod geometry;
pub mod io;
pub mod ode;
pub mod optimizer;
pub mod propagation;
pub mod runner;
pub mod scalar;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type PlanarPoint = geometry::Point<f64>;
pub type ArrayGeometry = geometry::ArrayGeometry<f64>;
pub type BeamControl = beamforming::BeamControl<f64>;
pub type FarFieldGeometry = beamforming::FarFieldGeometry<f64>;
pub type RadioParams = propagation::RadioParams<f64>;
pub type ActivationSpec = propagation::ActivationSpec<f64>;
pub type Activation = propagation::Activation<f64>;
pub type UavState = optimizer::UavState<f64>;
pub type Costate = optimizer::Costate<f64>;
pub type CostWeights = optimizer::CostWeights<f64>;
pub type JammingProblem = optimizer::JammingProblem<f64>;
pub type BvpSolution = optimizer::BvpSolution<f64>;
pub type SolverOptions = optimizer::SolverOptions<f64>;
pub type TargetMotion = sim::TargetMotion;
pub type TrajectoryLog = sim::TrajectoryLog;
pub type ScenarioFile = scenario::Scenario;
pub type SummaryReport = io::SummaryReport;
