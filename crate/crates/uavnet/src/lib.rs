//! File formats, runs and sweeps for the `uavnet` command-line tool.
//!
//! The simulation itself lives in `uavnet-core`; this crate reads TOML
//! configs, writes `metrics.csv`, `summary.json` and `config.resolved`, fans
//! sweeps out over a thread pool and summarizes finished runs.

pub mod config_file;
pub mod metrics;
pub mod report;
pub mod run;
pub mod sweep;

pub use config_file::{load_config, load_scenario, parse_config, to_toml, LoadError};
pub use metrics::{read_metrics_file, write_metrics_file, MetricsError, HEADER};
pub use report::{convergence_episode, summarize, Summary};
pub use run::{simulate, write_run, RunError, RunOutput};
pub use sweep::{run_sweep, SweepError, SweepPlan, SweepRow};
