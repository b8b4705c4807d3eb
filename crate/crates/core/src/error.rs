use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RadioError {
    #[error("transmitter and receiver are co-located (r = h = 0)")]
    DegenerateGeometry,
    #[error("interference-limited SIR needs at least one interferer")]
    NoInterferers,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("`{key}`: {reason}")]
    Range { key: String, reason: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("`{key}` is not numeric")]
    NotNumeric { key: String },
}

impl ConfigError {
    pub fn range(key: &str, reason: impl Into<String>) -> Self {
        ConfigError::Range { key: key.into(), reason: reason.into() }
    }

    /// Dotted key the error refers to.
    pub fn key(&self) -> &str {
        match self {
            ConfigError::Range { key, .. } => key,
            ConfigError::UnknownKey(key) => key,
            ConfigError::NotNumeric { key } => key,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("degenerate normalization range (max == min)")]
pub struct DegenerateRange;
