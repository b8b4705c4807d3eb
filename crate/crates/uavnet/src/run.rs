//! Single runs and their output directory.

use std::fs;
use std::path::{Path, PathBuf};

use uavnet_core::engine::Violation;
use uavnet_core::{ConfigError, EpisodeMetrics, SimConfig, World};

use crate::config_file::to_toml;
use crate::metrics::{write_metrics_file, MetricsError};
use crate::report::{summarize, Summary};

pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const RESOLVED_FILE: &str = "config.resolved";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write `{}`: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub metrics: Vec<EpisodeMetrics>,
    pub summary: Summary,
    pub violations: Vec<Violation>,
}

/// Runs `cfg.sim.episodes` episodes.
pub fn simulate(cfg: &SimConfig) -> Result<RunOutput, ConfigError> {
    let mut world = World::new(cfg.clone())?;
    let metrics = world.run(cfg.sim.episodes);
    let summary = summarize(&metrics, Some(cfg));
    Ok(RunOutput { metrics, summary, violations: world.violations().to_vec() })
}

/// Writes `metrics.csv`, `summary.json` and `config.resolved` into `dir`.
pub fn write_run(dir: &Path, cfg: &SimConfig, out: &RunOutput) -> Result<(), RunError> {
    let io = |path: PathBuf| move |source| RunError::Io { path, source };
    fs::create_dir_all(dir).map_err(io(dir.into()))?;
    write_metrics_file(&dir.join(METRICS_FILE), &out.metrics)?;
    let json = serde_json::to_string_pretty(&out.summary).expect("summaries serialize");
    let path = dir.join(SUMMARY_FILE);
    fs::write(&path, json + "\n").map_err(io(path))?;
    let path = dir.join(RESOLVED_FILE);
    fs::write(&path, to_toml(cfg)).map_err(io(path))?;
    Ok(())
}
