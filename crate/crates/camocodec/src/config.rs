//! JSON pipeline configuration. Every field has a default, so `{}` is a
//! complete document.

use std::path::{Path, PathBuf};

use camocodec_core::dnn::{GridAxes, TrainConfig};
use camocodec_core::dsp::MfccConfig;
use camocodec_core::sonify::EncodeConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_text;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// Images are downscaled to `height x width` grayscale pixels.
    pub height: usize,
    pub width: usize,
    pub train: TrainConfig,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig { height: 64, width: 64, train: TrainConfig { neurons: vec![128], ..TrainConfig::default() } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub manifest: PathBuf,
    pub output: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths { manifest: PathBuf::from("manifest.csv"), output: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub encode: EncodeConfig,
    pub mfcc: MfccConfig,
    pub train: TrainConfig,
    /// When present, `train` runs a grid search instead of a single fit.
    pub grid: Option<GridAxes>,
    pub baseline: BaselineConfig,
    pub paths: Paths,
    /// Master seed. It replaces the `seed` of `train`, `grid` and
    /// `baseline.train` so one number pins the whole run.
    pub seed: u64,
}

impl PipelineConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig =
            serde_json::from_str(text).map_err(|source| Error::Config { path: origin.to_path_buf(), source })?;
        let base = origin.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.paths.manifest, &mut cfg.paths.output] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths inside it resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_text(path)?, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.encode.validate()?;
        self.mfcc.validate()?;
        self.train_config().validate()?;
        self.baseline_train_config().validate()?;
        if let Some(g) = self.grid_axes() {
            g.configs()?;
        }
        if self.baseline.height == 0 || self.baseline.width == 0 {
            return Err(Error::Invalid("baseline image size must be positive".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig { seed: self.seed, ..self.train.clone() }
    }

    pub fn baseline_train_config(&self) -> TrainConfig {
        TrainConfig { seed: self.seed, ..self.baseline.train.clone() }
    }

    pub fn grid_axes(&self) -> Option<GridAxes> {
        self.grid.clone().map(|g| GridAxes { seed: self.seed, ..g })
    }
}
