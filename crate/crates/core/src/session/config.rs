use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SessionError;
use crate::engines::{TrainConfig, DEFAULT_FOLDS, DEFAULT_SIZES};
use crate::ghg::EnergyModel;

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_BIND: &str = "127.0.0.1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub folds: usize,
    pub curve_sizes: Vec<f64>,
    pub network: TrainConfig,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            folds: DEFAULT_FOLDS,
            curve_sizes: DEFAULT_SIZES.to_vec(),
            network: TrainConfig::default(),
        }
    }
}

/// Workbench settings, read from TOML.
///
/// Relative paths are taken from the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkbenchConfig {
    pub data_dir: PathBuf,
    /// Registry CSV; the bundled one when absent.
    #[serde(default)]
    pub registry: Option<PathBuf>,
    /// Algorithm table; the bundled one when absent.
    #[serde(default)]
    pub algorithms: Option<PathBuf>,
    pub ledger: PathBuf,
    pub output_dir: PathBuf,
    #[serde(default = "default_bind")]
    pub bind: String,
    #[serde(default = "default_port")]
    pub port: u16,
    #[serde(default)]
    pub auto_confirm: bool,
    #[serde(default)]
    pub energy: EnergyModel,
    #[serde(default)]
    pub training: TrainingConfig,
}

fn default_bind() -> String {
    DEFAULT_BIND.to_string()
}

fn default_port() -> u16 {
    DEFAULT_PORT
}

impl WorkbenchConfig {
    /// `data/`, `ledger.jsonl` and `out/` under `root`.
    pub fn in_dir(root: &Path) -> WorkbenchConfig {
        WorkbenchConfig {
            data_dir: root.join("data"),
            registry: None,
            algorithms: None,
            ledger: root.join("ledger.jsonl"),
            output_dir: root.join("out"),
            bind: default_bind(),
            port: DEFAULT_PORT,
            auto_confirm: false,
            energy: EnergyModel::default(),
            training: TrainingConfig::default(),
        }
    }

    pub fn from_toml(text: &str, base: &Path) -> Result<WorkbenchConfig, SessionError> {
        let mut cfg: WorkbenchConfig = toml::from_str(text).map_err(|e| SessionError::Config(e.to_string()))?;
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        rebase(&mut cfg.data_dir);
        rebase(&mut cfg.ledger);
        rebase(&mut cfg.output_dir);
        if let Some(p) = cfg.registry.as_mut() {
            rebase(p);
        }
        if let Some(p) = cfg.algorithms.as_mut() {
            rebase(p);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<WorkbenchConfig, SessionError> {
        let text = fs::read_to_string(path).map_err(|e| SessionError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        self.energy.validate()?;
        let t = &self.training;
        if t.folds < 2 {
            return Err(SessionError::Config(format!("training.folds must be at least 2, got {}", t.folds)));
        }
        if t.curve_sizes.is_empty() || t.curve_sizes.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
            return Err(SessionError::Config("training.curve_sizes must lie in (0, 1]".into()));
        }
        Ok(())
    }
}
