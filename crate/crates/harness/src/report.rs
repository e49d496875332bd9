//! Result files and the run manifest.
//!
//! `results.csv`, any further tables and `summary.json` depend only on the
//! configuration. `manifest.json` also records the wall time and worker
//! count, so it is the one file that differs between repeated runs.

use std::fs;
use std::io;
use std::path::Path;
use std::time::Instant;

use crate::config::{ConfigErrors, ExperimentConfig};
use crate::experiment::{run_experiment, AuditSummary, Criterion, Outcome, Row, RunOptions, Status};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct RunManifest {
    /// The configuration file as given.
    pub config: String,
    /// The configuration with defaults filled in; empty if it did not
    /// validate.
    pub normalized: String,
    pub version: String,
    pub wall_time_seconds: f64,
    pub workers: usize,
    pub status: Status,
    pub exit_code: i32,
    pub audit: AuditSummary,
    pub criteria: Vec<Criterion>,
    pub files: Vec<String>,
    pub error: Option<String>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn status_label(&self) -> &'static str {
        match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Invalid => "invalid configuration",
        }
    }
}

fn write_table(path: &Path, rows: &[Row]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(["t", "estimate", "stderr", "n"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Writes the result files of `outcome` into `dir` and returns their names.
pub fn write_outcome(dir: &Path, outcome: &Outcome) -> io::Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut files = vec!["results.csv".to_string()];
    write_table(&dir.join("results.csv"), &outcome.results)?;
    for (name, rows) in &outcome.tables {
        let file = format!("{name}.csv");
        write_table(&dir.join(&file), rows)?;
        files.push(file);
    }
    write_json(&dir.join("summary.json"), &outcome.summary)?;
    files.push("summary.json".into());
    Ok(files)
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("manifest.json"), manifest)
}

/// Runs the experiment and writes its results and manifest into `dir`. The
/// manifest is written whatever happens to the run.
pub fn run(config: &ExperimentConfig, options: RunOptions, dir: &Path) -> io::Result<RunManifest> {
    let start = Instant::now();
    let outcome = run_experiment(config, options);
    let mut manifest = RunManifest {
        config: config.source.clone(),
        normalized: config.to_text(),
        version: VERSION.to_string(),
        wall_time_seconds: 0.0,
        workers: options.workers,
        status: Status::Fail,
        exit_code: Status::Fail.exit_code(),
        audit: AuditSummary::default(),
        criteria: Vec::new(),
        files: Vec::new(),
        error: None,
    };
    match outcome {
        Ok(outcome) => {
            manifest.status = outcome.status();
            manifest.exit_code = manifest.status.exit_code();
            manifest.audit = outcome.audit;
            manifest.criteria = outcome.criteria.clone();
            manifest.error = outcome.error.clone();
            match write_outcome(dir, &outcome) {
                Ok(files) => manifest.files = files,
                Err(e) => {
                    manifest.status = Status::Fail;
                    manifest.exit_code = Status::Fail.exit_code();
                    manifest.error = Some(format!("writing results: {e}"));
                }
            }
        }
        Err(e) => manifest.error = Some(e.to_string()),
    }
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    write_manifest(dir, &manifest)?;
    Ok(manifest)
}

/// Records a configuration that failed validation.
pub fn reject(source: &str, errors: &ConfigErrors, dir: &Path) -> io::Result<RunManifest> {
    let manifest = RunManifest {
        config: source.to_string(),
        normalized: String::new(),
        version: VERSION.to_string(),
        wall_time_seconds: 0.0,
        workers: 0,
        status: Status::Invalid,
        exit_code: Status::Invalid.exit_code(),
        audit: AuditSummary::default(),
        criteria: Vec::new(),
        files: Vec::new(),
        error: Some(errors.to_string()),
    };
    write_manifest(dir, &manifest)?;
    Ok(manifest)
}
