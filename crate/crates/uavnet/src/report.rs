//! Run summaries: convergence, residual energy and throughput.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use uavnet_core::{EpisodeMetrics, SimConfig};

/// Sliding window used for convergence, in episodes.
pub const WINDOW: usize = 100;
/// Relative band around the final window mean.
pub const TOLERANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub episodes: u64,
    pub injected: u64,
    pub delivered: u64,
    pub dropped: u64,
    /// delivered / injected, in [0, 1].
    pub throughput: f64,
    pub throughput_pct: f64,
    pub cum_reward: f64,
    pub residual_energy_j: f64,
    /// Share of the fleet's full capacity left at the end. Unknown without
    /// the run's config.
    pub residual_energy_pct: Option<f64>,
    pub convergence_episode: u64,
}

/// Reward earned in each episode.
pub fn episode_rewards(rows: &[EpisodeMetrics]) -> Vec<f64> {
    let mut prev = 0.0;
    rows.iter()
        .map(|r| {
            let d = r.cum_reward - prev;
            prev = r.cum_reward;
            d
        })
        .collect()
}

/// Means of every `window`-long run of consecutive values, by start index.
pub fn sliding_means(values: &[f64], window: usize) -> Vec<f64> {
    if window == 0 || values.len() < window {
        return Vec::new();
    }
    let mut sum: f64 = values[..window].iter().sum();
    let mut out = vec![sum / window as f64];
    for i in window..values.len() {
        sum += values[i] - values[i - window];
        out.push(sum / window as f64);
    }
    out
}

/// First episode from which every 100-episode window mean stays within ±5%
/// of the last window's mean. Runs shorter than a window count as converged
/// at 0.
pub fn convergence_episode(rewards: &[f64]) -> u64 {
    let means = sliding_means(rewards, WINDOW);
    let Some(&last) = means.last() else {
        return 0;
    };
    let band = TOLERANCE * last.abs();
    let mut start = means.len() - 1;
    while start > 0 && (means[start - 1] - last).abs() <= band {
        start -= 1;
    }
    start as u64
}

pub fn summarize(rows: &[EpisodeMetrics], cfg: Option<&SimConfig>) -> Summary {
    let last = rows.last().copied().unwrap_or(EpisodeMetrics {
        episode: 0,
        cum_reward: 0.0,
        residual_energy_j: 0.0,
        delivered: 0,
        dropped: 0,
        fragmented: 0,
        mean_q: 0.0,
    });
    let injected = last.delivered + last.dropped;
    let throughput = if injected == 0 { 0.0 } else { last.delivered as f64 / injected as f64 };
    let capacity = cfg.map(|c| c.energy.initial_j * f64::from(c.sim.num_uavs));
    Summary {
        episodes: rows.len() as u64,
        injected,
        delivered: last.delivered,
        dropped: last.dropped,
        throughput,
        throughput_pct: 100.0 * throughput,
        cum_reward: last.cum_reward,
        residual_energy_j: last.residual_energy_j,
        residual_energy_pct: capacity.map(|c| 100.0 * last.residual_energy_j / c),
        convergence_episode: convergence_episode(&episode_rewards(rows)),
    }
}

/// Long-format `episode,series,value` table for plotting.
pub fn write_long_csv<W: Write>(out: W, rows: &[EpisodeMetrics]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["episode", "series", "value"])?;
    let rewards = episode_rewards(rows);
    let means = sliding_means(&rewards, WINDOW);
    for (i, r) in rows.iter().enumerate() {
        let mut put = |series: &str, v: f64| w.serialize((r.episode, series, v));
        put("reward", rewards[i])?;
        if let Some(&m) = means.get(i) {
            put("reward_window_mean", m)?;
        }
        put("cum_reward", r.cum_reward)?;
        put("residual_energy_j", r.residual_energy_j)?;
        put("delivered", r.delivered as f64)?;
        put("dropped", r.dropped as f64)?;
        put("fragmented", r.fragmented as f64)?;
        put("mean_q", r.mean_q)?;
    }
    w.flush().map_err(csv::Error::from)
}

pub fn print_summary<W: Write>(mut out: W, s: &Summary) -> io::Result<()> {
    writeln!(out, "episodes            {}", s.episodes)?;
    writeln!(out, "convergence episode {}", s.convergence_episode)?;
    match s.residual_energy_pct {
        Some(p) => writeln!(out, "residual energy     {p:.2}% ({:.1} J)", s.residual_energy_j)?,
        None => writeln!(out, "residual energy     {:.1} J", s.residual_energy_j)?,
    }
    writeln!(out, "throughput          {:.2}% ({}/{})", s.throughput_pct, s.delivered, s.injected)?;
    writeln!(out, "cumulative reward   {:.4}", s.cum_reward)
}
