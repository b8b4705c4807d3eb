//! TOML config files.
//!
//! Sections mirror [`SimConfig`]; absent keys take their defaults, unknown
//! keys are rejected. Errors carry the dotted key and the line it sits on.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use uavnet_core::config::ScenarioSection;
use uavnet_core::{ConfigError, SimConfig};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read `{}`: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse { path: PathBuf, key: Option<String>, line: usize, column: usize, message: String },
    #[error("{}{}: {source}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    Invalid { path: PathBuf, line: Option<usize>, source: ConfigError },
}

impl LoadError {
    /// Dotted key the error points at, when one can be named.
    pub fn key(&self) -> Option<&str> {
        match self {
            LoadError::Io { .. } => None,
            LoadError::Parse { key, .. } => key.as_deref(),
            LoadError::Invalid { source, .. } => Some(source.key()),
        }
    }

    /// 1-based line of the offending entry, when known.
    pub fn line(&self) -> Option<usize> {
        match self {
            LoadError::Io { .. } => None,
            LoadError::Parse { line, .. } => Some(*line),
            LoadError::Invalid { line, .. } => *line,
        }
    }
}

pub fn load_config(path: &Path) -> Result<SimConfig, LoadError> {
    let text = read(path)?;
    parse_config(&text, path)
}

/// Parses and validates config text. `origin` only labels errors.
pub fn parse_config(text: &str, origin: &Path) -> Result<SimConfig, LoadError> {
    let cfg: SimConfig = toml::from_str(text).map_err(|e| parse_error(text, origin, &e))?;
    validate_in(&cfg, text, origin)?;
    Ok(cfg)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    scenario: ScenarioSection,
}

/// Reads a file holding only `[[scenario.event]]` tables.
pub fn load_scenario(path: &Path) -> Result<ScenarioSection, LoadError> {
    let text = read(path)?;
    let file: ScenarioFile = toml::from_str(&text).map_err(|e| parse_error(&text, path, &e))?;
    Ok(file.scenario)
}

/// Validates `cfg`, locating any failing key in `text`.
pub fn validate_in(cfg: &SimConfig, text: &str, origin: &Path) -> Result<(), LoadError> {
    cfg.validate()
        .map_err(|source| LoadError::Invalid { path: origin.to_path_buf(), line: locate(text, source.key()), source })
}

/// The fully resolved config as TOML. Loading it back gives the same config.
pub fn to_toml(cfg: &SimConfig) -> String {
    toml::to_string(cfg).expect("configs always serialize")
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}

fn parse_error(text: &str, origin: &Path, e: &toml::de::Error) -> LoadError {
    let offset = e.span().map_or(0, |s| s.start);
    let (line, column) = line_col(text, offset);
    LoadError::Parse {
        path: origin.to_path_buf(),
        key: key_at(text, offset),
        line,
        column,
        message: e.message().trim().to_string(),
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Table name of a header line such as `[rl]` or `[[scenario.event]]`.
fn header(line: &str) -> Option<(&str, bool)> {
    let t = line.trim();
    if let Some(inner) = t.strip_prefix("[[").and_then(|r| r.split("]]").next()) {
        return Some((inner.trim(), true));
    }
    t.strip_prefix('[').and_then(|r| r.split(']').next()).map(|inner| (inner.trim(), false))
}

fn entry_key(line: &str) -> Option<&str> {
    let t = line.trim();
    if t.starts_with('#') || t.starts_with('[') {
        return None;
    }
    t.split_once('=').map(|(k, _)| k.trim().trim_matches('"'))
}

/// Dotted key of the entry at byte `offset`.
fn key_at(text: &str, offset: usize) -> Option<String> {
    let (line_no, _) = line_col(text, offset);
    let lines: Vec<&str> = text.lines().collect();
    let line = lines.get(line_no - 1)?;
    if let Some((table, _)) = header(line) {
        return Some(table.to_string());
    }
    let key = entry_key(line)?;
    let table = lines[..line_no - 1].iter().rev().find_map(|l| header(l)).map(|h| h.0);
    Some(match table {
        Some(t) => format!("{t}.{key}"),
        None => key.to_string(),
    })
}

/// 1-based line of a dotted key such as `rl.epsilon` or
/// `scenario.event[1].fraction`.
pub fn locate(text: &str, dotted: &str) -> Option<usize> {
    let (table, key) = match dotted.rsplit_once('.') {
        Some((t, k)) => (t, k),
        None => ("", dotted),
    };
    let (table, index) = match table.split_once('[') {
        Some((t, rest)) => (t, rest.trim_end_matches(']').parse::<usize>().ok()),
        None => (table, None),
    };
    let mut seen = 0usize;
    let mut in_target = table.is_empty();
    for (i, line) in text.lines().enumerate() {
        if let Some((name, array)) = header(line) {
            in_target = name == table && (!array || index.is_none_or(|want| want == seen));
            if array && name == table {
                seen += 1;
            }
            continue;
        }
        if in_target && entry_key(line) == Some(key) {
            return Some(i + 1);
        }
    }
    None
}
