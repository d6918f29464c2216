//! Experiment pipeline: config, truth simulation, shadow sampling,
//! CS reconstruction sweeps, reports and theory tables.

pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod pipeline;
pub mod report;
pub mod theory;

pub use config::{ExperimentConfig, Profile};
pub use error::{ExpError, Result};
pub use pipeline::Pipeline;
