//! Configuration-driven experiment runner.
//!
//! A run reads a `key = value` configuration file, simulates the requested
//! replicas and writes `results.csv`, `summary.json` and `manifest.json`
//! into the output directory.

pub mod config;
pub mod experiment;
pub mod report;

pub use config::{ConfigErrors, ConfigIssue, Expectation, ExperimentConfig, FunctionSpec, Kind};
pub use experiment::{run_experiment, AuditSummary, Criterion, Outcome, ReplicaOrder, Row, RunOptions, Status};
pub use report::{reject, run, write_manifest, write_outcome, RunManifest, VERSION};
