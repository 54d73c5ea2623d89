use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use favorit_core::bootstrap::DEFAULT_REPLICATES;
use serde::{Deserialize, Serialize};

/// Server settings, usually read from a TOML file.
///
/// ```toml
/// listen = "127.0.0.1:8080"
/// dataset = "data/maharashtra"
/// seed = 42
/// static_dir = "advisor-ui/dist"
///
/// [[summary_fixtures]]
/// market = "Satara"
/// commodity = "Tomato"
/// path = "fixtures/satara_tomato_monthly_summaries.csv"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_listen")]
    pub listen: SocketAddr,
    /// Directory written by `favorit ingest`.
    pub dataset: Option<PathBuf>,
    /// Bootstrap seed used for every interval this instance serves.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Days of history each forecast is fitted on.
    #[serde(default = "default_fit_len")]
    pub fit_len: usize,
    /// Served at `/` when set.
    pub static_dir: Option<PathBuf>,
    /// Allowed CORS origins; any origin when absent.
    pub cors_origins: Option<Vec<String>>,
    #[serde(default)]
    pub summary_fixtures: Vec<SummaryFixture>,
}

/// Published monthly summaries served in place of computed ones for a
/// market and commodity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryFixture {
    pub market: String,
    pub commodity: String,
    pub path: PathBuf,
}

fn default_listen() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 8080))
}

fn default_seed() -> u64 {
    42
}

fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}

fn default_fit_len() -> usize {
    100
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            listen: default_listen(),
            dataset: None,
            seed: default_seed(),
            replicates: default_replicates(),
            fit_len: default_fit_len(),
            static_dir: None,
            cors_origins: None,
            summary_fixtures: Vec::new(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.dataset.as_mut() {
            resolve(p);
        }
        if let Some(p) = cfg.static_dir.as_mut() {
            resolve(p);
        }
        for f in &mut cfg.summary_fixtures {
            resolve(&mut f.path);
        }
        Ok(cfg)
    }
}
