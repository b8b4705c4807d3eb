//! `metrics.csv`: one [`EpisodeMetrics`] row per episode.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use uavnet_core::EpisodeMetrics;

pub const HEADER: [&str; 7] = ["episode", "cum_reward", "residual_energy_j", "delivered", "dropped", "fragmented", "mean_q"];

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("cannot open `{}`: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("`{}`: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("`{}`: unexpected header `{found}`", path.display())]
    Header { path: PathBuf, found: String },
    #[error("`{}` holds no rows", path.display())]
    Empty { path: PathBuf },
}

pub fn write_metrics<W: Write>(out: W, rows: &[EpisodeMetrics]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_metrics_file(path: &Path, rows: &[EpisodeMetrics]) -> Result<(), MetricsError> {
    let file = File::create(path).map_err(|source| MetricsError::Io { path: path.into(), source })?;
    write_metrics(io::BufWriter::new(file), rows).map_err(|source| MetricsError::Csv { path: path.into(), source })
}

pub fn read_metrics_file(path: &Path) -> Result<Vec<EpisodeMetrics>, MetricsError> {
    let file = File::open(path).map_err(|source| MetricsError::Io { path: path.into(), source })?;
    let csv_err = |source| MetricsError::Csv { path: path.into(), source };
    let mut r = csv::Reader::from_reader(io::BufReader::new(file));
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(HEADER) {
        return Err(MetricsError::Header { path: path.into(), found: header.iter().collect::<Vec<_>>().join(",") });
    }
    let rows: Vec<EpisodeMetrics> = r.deserialize().collect::<Result<_, _>>().map_err(csv_err)?;
    if rows.is_empty() {
        return Err(MetricsError::Empty { path: path.into() });
    }
    Ok(rows)
}
