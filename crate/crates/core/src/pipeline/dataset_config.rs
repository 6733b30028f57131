use std::path::{Path, PathBuf};

use serde_json::Value;

use super::{Error, Result};
use crate::randomizer::{ConfigError, EnvironmentLibrary, GenerationConfig, Randomizer};

/// Environment variable consulted when neither flag nor config sets a seed.
pub const SEED_ENV: &str = "SDRFORGE_SEED";

/// One generation configuration with the directory its relative paths resolve against.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPart {
    pub config: GenerationConfig,
    pub base_dir: PathBuf,
}

/// A single configuration, or several generated back to back into one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub parts: Vec<DatasetPart>,
}

impl DatasetConfig {
    pub fn total_frames(&self) -> usize {
        self.parts.iter().map(|p| p.config.dataset_size).sum()
    }

    /// Keeps the first `frames` frames, dropping or shortening trailing parts.
    /// A single configuration is resized instead.
    pub fn with_frames(mut self, frames: usize) -> Self {
        if self.parts.len() == 1 {
            self.parts[0].config.dataset_size = frames;
            return self;
        }
        let mut left = frames;
        self.parts.retain_mut(|p| {
            if left == 0 {
                return false;
            }
            p.config.dataset_size = p.config.dataset_size.min(left);
            left -= p.config.dataset_size;
            true
        });
        self
    }

    pub fn randomizers(&self) -> Result<Vec<Randomizer>> {
        self.parts
            .iter()
            .map(|p| {
                let lib = EnvironmentLibrary::load(&p.config.hdri_library, &p.base_dir)?;
                Ok(Randomizer::new(p.config.clone(), lib)?)
            })
            .collect()
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn prefix(e: ConfigError, file: &Path) -> ConfigError {
    ConfigError::new(e.path, format!("{} (in {})", e.message, file.display()))
}

/// Reads a generation config, or `{"concatenate": [paths...]}` listing
/// configs (relative to the listing file) to generate in sequence.
pub fn load_dataset_config(path: &Path) -> Result<DatasetConfig> {
    let text = read(path)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let value: Value = serde_json::from_str(&text).map_err(|e| ConfigError::new("$", format!("{e} (in {})", path.display())))?;
    let Some(list) = value.as_object().and_then(|o| o.get("concatenate")) else {
        let config = GenerationConfig::from_json_str(&text).map_err(|e| prefix(e, path))?;
        return Ok(DatasetConfig {
            parts: vec![DatasetPart { config, base_dir }],
        });
    };
    if let Some(extra) = value.as_object().and_then(|o| o.keys().find(|k| *k != "concatenate")) {
        return Err(ConfigError::new(extra.to_string(), format!("unknown field `{extra}` (in {})", path.display())).into());
    }
    let items = list
        .as_array()
        .filter(|a| !a.is_empty())
        .ok_or_else(|| ConfigError::new("concatenate", "expected a non-empty array of config paths"))?;
    let mut parts = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let rel = item
            .as_str()
            .ok_or_else(|| ConfigError::new(format!("concatenate[{i}]"), "expected a path string"))?;
        let sub = base_dir.join(rel);
        let sub_cfg = load_dataset_config(&sub)?;
        parts.extend(sub_cfg.parts);
    }
    Ok(DatasetConfig { parts })
}

/// Flag, then config value, then the environment, then 0.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>, env: Option<&str>) -> Result<u64> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| ConfigError::new(SEED_ENV, format!("`{v}` is not an unsigned 64-bit integer")).into()),
        None => Ok(0),
    }
}
