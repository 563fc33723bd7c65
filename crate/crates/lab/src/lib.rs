//! Experiment runner for `ergodic-core`: TOML/JSON experiment definitions,
//! the six experiment kinds, and CSV/JSON reports.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::Path;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind, Format, Schedule};
pub use experiments::{run_experiment, RunError};
pub use report::{emit, ExperimentReport, Flag, Row, Verdict};

/// Runs the experiment and, when `out` (or else the configured `output`) is
/// set, writes the report there.
pub fn run(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<ExperimentReport, RunError> {
    let report = run_experiment(cfg)?;
    let format = cfg.format.unwrap_or_default();
    if let Some(path) = out.or(cfg.output.as_deref().map(Path::new)) {
        emit(&report, format, path)?;
    }
    Ok(report)
}
