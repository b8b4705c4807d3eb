//! Parameter sweeps: every (value, seed) cell runs independently on a rayon
//! pool and the summaries are merged in a fixed order.

use std::fs::{self, File};
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use uavnet_core::{ConfigError, SimConfig};

use crate::run::{simulate, write_run, RunError};

pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("no values to sweep")]
    NoValues,
    #[error("no seeds to sweep")]
    NoSeeds,
    #[error("`{param}` = {value}: {source}")]
    Invalid { param: String, value: f64, source: ConfigError },
    #[error("cannot build a pool of {jobs} threads: {reason}")]
    Pool { jobs: usize, reason: String },
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("cannot write `{}`: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("`{}`: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

/// One merged summary line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub seed: u64,
    pub episodes: u64,
    pub cum_reward: f64,
    pub delivered: u64,
    pub dropped: u64,
    pub throughput: f64,
    pub residual_energy_j: f64,
    pub residual_energy_pct: f64,
    pub convergence_episode: u64,
}

#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub base: SimConfig,
    pub param: String,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
}

impl SweepPlan {
    /// Every cell's config, value-major. Fails before anything runs if the
    /// key is unknown or any value is out of range.
    pub fn cells(&self) -> Result<Vec<SimConfig>, SweepError> {
        if self.values.is_empty() {
            return Err(SweepError::NoValues);
        }
        if self.seeds.is_empty() {
            return Err(SweepError::NoSeeds);
        }
        let mut out = Vec::with_capacity(self.values.len() * self.seeds.len());
        for &value in &self.values {
            for &seed in &self.seeds {
                let invalid = |source| SweepError::Invalid { param: self.param.clone(), value, source };
                let mut cfg = self.base.clone();
                cfg.set_numeric(&self.param, value).map_err(invalid)?;
                cfg.sim.seed = seed;
                cfg.validate().map_err(invalid)?;
                out.push(cfg);
            }
        }
        Ok(out)
    }
}

/// Directory name of one cell, e.g. `rl.epsilon=0.5_seed=2`.
pub fn cell_dir(param: &str, value: f64, seed: u64) -> String {
    format!("{param}={value}_seed={seed}")
}

/// Runs the plan on `jobs` threads. With `out` set, each cell writes its run
/// directory there and the merged rows go to `sweep.csv`.
pub fn run_sweep(plan: &SweepPlan, jobs: usize, out: Option<&Path>) -> Result<Vec<SweepRow>, SweepError> {
    let cells = plan.cells()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SweepError::Pool { jobs, reason: e.to_string() })?;
    let value_of = |cfg: &SimConfig| cfg.get_numeric(&plan.param).expect("validated key");
    let mut rows: Vec<SweepRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|cfg| -> Result<SweepRow, SweepError> {
                let run = simulate(cfg).map_err(|source| SweepError::Invalid { param: plan.param.clone(), value: value_of(cfg), source })?;
                if let Some(dir) = out {
                    write_run(&dir.join(cell_dir(&plan.param, value_of(cfg), cfg.sim.seed)), cfg, &run)?;
                }
                let s = &run.summary;
                Ok(SweepRow {
                    param: plan.param.clone(),
                    value: value_of(cfg),
                    seed: cfg.sim.seed,
                    episodes: s.episodes,
                    cum_reward: s.cum_reward,
                    delivered: s.delivered,
                    dropped: s.dropped,
                    throughput: s.throughput,
                    residual_energy_j: s.residual_energy_j,
                    residual_energy_pct: s.residual_energy_pct.unwrap_or(0.0),
                    convergence_episode: s.convergence_episode,
                })
            })
            .collect::<Result<_, _>>()
    })?;
    rows.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.seed.cmp(&b.seed)));
    if let Some(dir) = out {
        write_sweep_csv(&dir.join(SWEEP_FILE), &rows)?;
    }
    Ok(rows)
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), SweepError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| SweepError::Io { path: parent.into(), source })?;
    }
    let file = File::create(path).map_err(|source| SweepError::Io { path: path.into(), source })?;
    let csv_err = |source| SweepError::Csv { path: path.into(), source };
    let mut w = csv::Writer::from_writer(io::BufWriter::new(file));
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| SweepError::Io { path: path.into(), source })
}
