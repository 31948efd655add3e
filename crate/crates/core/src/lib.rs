//! Dependence measures between time series built from ordinal patterns of
//! sliding windows, with simulation tools for Monte Carlo studies.

pub mod error;
pub mod estimate;
pub mod gaussian;
pub mod harness;
pub mod kendall;
pub mod opd;
pub mod pattern;
pub mod pearson;
pub mod procgen;
pub mod rng;

pub use error::{Error, Result};
pub use estimate::{DependenceEstimate, Measure};
pub use gaussian::{GaussianModel, McEstimate};
pub use harness::{run_experiment, ExperimentConfig, ExperimentReport};
pub use procgen::{Family, ProcessSpec, Sample};
pub use rng::Seed;
