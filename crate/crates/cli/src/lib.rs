//! Configuration, experiment drivers and output handling for the `surflab` binary.

pub mod config;
pub mod corpus;
pub mod experiments;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use experiments::{run_experiment, Artifacts};
pub use runner::{execute, RunError, RunOptions};
