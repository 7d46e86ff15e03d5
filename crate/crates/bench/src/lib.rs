//! Experiment runner for the phase-retrieval pipelines: dataset sweeps over
//! noise levels, deterministic seeding, and CSV/console reporting.

pub mod config;
mod error;
pub mod experiment;
pub mod report;
pub mod seed;

pub use config::{Algorithm, DenoiserSpec, ExperimentConfig};
pub use error::{BenchError, Result};
pub use experiment::run_experiment;
pub use report::{emit_table, ReportRow, Summary};
pub use seed::derive_seed;
