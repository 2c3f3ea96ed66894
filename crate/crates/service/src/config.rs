use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shadowlayout_core::{DEFAULT_DESCRIPTOR_G, DEFAULT_HEATMAP_G, DEFAULT_K};

use crate::ServiceError;

/// Flat key-value service configuration (TOML).
///
/// ```toml
/// bind = "127.0.0.1:8080"
/// corpus = "corpus.jsonl"
/// images = "slides"
/// descriptor_g = 16
/// heatmap_g = 32
/// default_k = 8
/// cors_allow_origin = "*"
/// ```
///
/// Relative paths are resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_bind")]
    pub bind: SocketAddr,
    pub corpus: PathBuf,
    #[serde(default)]
    pub images: Option<PathBuf>,
    #[serde(default = "default_descriptor_g")]
    pub descriptor_g: usize,
    #[serde(default = "default_heatmap_g")]
    pub heatmap_g: usize,
    #[serde(default = "default_k")]
    pub default_k: usize,
    #[serde(default)]
    pub cors_allow_origin: Option<String>,
}

fn default_bind() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 8080))
}

fn default_descriptor_g() -> usize {
    DEFAULT_DESCRIPTOR_G
}

fn default_heatmap_g() -> usize {
    DEFAULT_HEATMAP_G
}

fn default_k() -> usize {
    DEFAULT_K
}

impl ServiceConfig {
    pub fn new(corpus: impl Into<PathBuf>) -> Self {
        Self {
            bind: default_bind(),
            corpus: corpus.into(),
            images: None,
            descriptor_g: DEFAULT_DESCRIPTOR_G,
            heatmap_g: DEFAULT_HEATMAP_G,
            default_k: DEFAULT_K,
            cors_allow_origin: None,
        }
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, ServiceError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))?;
        cfg.corpus = base_dir.join(&cfg.corpus);
        cfg.images = cfg.images.map(|p| base_dir.join(p));
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        if self.descriptor_g == 0 || self.heatmap_g == 0 {
            return Err(ServiceError::Config("grid sizes must be at least 1".into()));
        }
        if self.default_k == 0 {
            return Err(ServiceError::Config("default_k must be at least 1".into()));
        }
        if !self.corpus.is_file() {
            return Err(ServiceError::Config(format!("corpus {} is not a readable file", self.corpus.display())));
        }
        if let Some(dir) = &self.images {
            if !dir.is_dir() {
                return Err(ServiceError::Config(format!("image directory {} does not exist", dir.display())));
            }
        }
        Ok(())
    }
}
