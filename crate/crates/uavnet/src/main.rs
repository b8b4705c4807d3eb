use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use uavnet::config_file::validate_in;
use uavnet::report::{print_summary, write_long_csv};
use uavnet::run::RESOLVED_FILE;
use uavnet::{load_config, load_scenario, read_metrics_file, run_sweep, simulate, summarize, write_run, LoadError, SweepError, SweepPlan};
use uavnet_core::{Baseline, ConfigError, SimConfig};

#[derive(Parser)]
#[command(name = "uavnet", version, about = "Q(lambda) routing over a simulated UAV relay network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write metrics.csv, summary.json and config.resolved.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "run")]
        out: PathBuf,
    },
    /// Run every value x seed combination of one numeric key.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Dotted config key, e.g. rl.epsilon.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        /// Defaults to the configured seed.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        seeds: Vec<u64>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
    },
    /// Summarize a finished run directory and write report.csv next to it.
    Report {
        run_dir: PathBuf,
        /// Where to write the long-format table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    episodes: Option<u64>,
    #[arg(long, value_enum)]
    baseline: Option<BaselineArg>,
    /// TOML file of [[scenario.event]] tables; replaces the config's events.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Extra numeric override, KEY=VALUE. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, f64)>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    Iqmr,
    PlainQ,
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected KEY=VALUE")?;
    let v: f64 = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Exit status 1: the config or the command line was wrong.
struct ConfigFailure(anyhow::Error);

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<ConfigFailure> for Failure {
    fn from(e: ConfigFailure) -> Self {
        Failure::Config(e.0)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn resolve(args: &RunArgs) -> Result<SimConfig, ConfigFailure> {
    let fail = |e: anyhow::Error| ConfigFailure(e);
    let (mut cfg, text, origin) = match &args.config {
        Some(path) => {
            let cfg = load_config(path).map_err(|e| fail(e.into()))?;
            let text = fs::read_to_string(path).unwrap_or_default();
            (cfg, text, path.clone())
        }
        None => (SimConfig::default(), String::new(), PathBuf::from("<defaults>")),
    };
    if let Some(path) = &args.scenario {
        cfg.scenario = load_scenario(path).map_err(|e| fail(e.into()))?;
    }
    if let Some(seed) = args.seed {
        cfg.sim.seed = seed;
    }
    if let Some(n) = args.episodes {
        cfg.sim.episodes = n;
    }
    if let Some(b) = args.baseline {
        cfg.sim.baseline = match b {
            BaselineArg::Iqmr => Baseline::Iqmr,
            BaselineArg::PlainQ => Baseline::PlainQ,
        };
    }
    for (key, value) in &args.overrides {
        cfg.set_numeric(key, *value).map_err(|e| fail(e.into()))?;
    }
    validate_in(&cfg, &text, &origin).map_err(|e| fail(e.into()))?;
    Ok(cfg)
}

fn cmd_simulate(args: &RunArgs, out: &Path) -> Result<(), Failure> {
    let cfg = resolve(args)?;
    let run = simulate(&cfg).map_err(|e| ConfigFailure(e.into()))?;
    write_run(out, &cfg, &run).context("writing run outputs")?;
    print_summary(io::stdout().lock(), &run.summary).context("writing to stdout")?;
    if let Some(v) = run.violations.first() {
        return Err(anyhow::anyhow!("{} invariant violations, first at tick {}: {:?} {}", run.violations.len(), v.tick, v.kind, v.detail).into());
    }
    Ok(())
}

fn cmd_sweep(args: &RunArgs, param: &str, values: &[f64], seeds: &[u64], jobs: usize, out: &Path) -> Result<(), Failure> {
    let base = resolve(args)?;
    let seeds = if seeds.is_empty() { vec![base.sim.seed] } else { seeds.to_vec() };
    let plan = SweepPlan { base, param: param.to_string(), values: values.to_vec(), seeds };
    let jobs = if jobs == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { jobs };
    let rows = run_sweep(&plan, jobs, Some(out)).map_err(|e| match e {
        SweepError::NoValues | SweepError::NoSeeds | SweepError::Invalid { .. } => Failure::Config(e.into()),
        other => Failure::Runtime(other.into()),
    })?;
    println!("{:>12} {:>6} {:>12} {:>9} {:>9} {:>8}", "value", "seed", "cum_reward", "delivered", "residual%", "converge");
    for r in &rows {
        println!(
            "{:>12} {:>6} {:>12.3} {:>9} {:>9.2} {:>8}",
            r.value, r.seed, r.cum_reward, r.delivered, r.residual_energy_pct, r.convergence_episode
        );
    }
    Ok(())
}

fn cmd_report(run_dir: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let rows = read_metrics_file(&run_dir.join(uavnet::run::METRICS_FILE))?;
    let resolved = run_dir.join(RESOLVED_FILE);
    let cfg = if resolved.exists() {
        Some(load_config(&resolved).map_err(|e: LoadError| ConfigFailure(e.into()))?)
    } else {
        None
    };
    let summary = summarize(&rows, cfg.as_ref());
    print_summary(io::stdout().lock(), &summary).context("writing to stdout")?;
    let path = out.map_or_else(|| run_dir.join("report.csv"), Path::to_path_buf);
    let file = File::create(&path).with_context(|| format!("cannot create `{}`", path.display()))?;
    write_long_csv(BufWriter::new(file), &rows).with_context(|| format!("writing `{}`", path.display()))?;
    Ok(())
}

/// The error chain on one line, skipping causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let s = cause.to_string();
        if out.contains(&s) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&s);
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Simulate { run, out } => cmd_simulate(run, out),
        Command::Sweep { run, param, values, seeds, jobs, out } => cmd_sweep(run, param, values, seeds, *jobs, out),
        Command::Report { run_dir, out } => cmd_report(run_dir, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {}", describe(&e));
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}

impl From<ConfigError> for ConfigFailure {
    fn from(e: ConfigError) -> Self {
        ConfigFailure(e.into())
    }
}

impl From<uavnet::MetricsError> for Failure {
    fn from(e: uavnet::MetricsError) -> Self {
        Failure::Runtime(e.into())
    }
}
