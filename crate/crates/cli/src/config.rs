//! The run configuration file: one nested TOML document driving every
//! command.
//!
//! ```toml
//! version = 1
//!
//! [spec]
//! p = 2
//! s = 12
//! seasonal_order = 1
//! q = [2]
//! k = 10              # the decoder predicts k+1 steps
//!
//! [model]
//! kind = "sedx"       # sedx | bedx | sarx
//! hidden = 8
//! layers = 1
//!
//! [train]
//! batch_size = 64
//! learning_rate = 0.002
//! epochs = 12
//! seed = 7
//!
//! [eval]
//! test_len = 60       # points held out at the end of each series
//! val_len = 24        # points just before the test region
//! metric = "mase"
//! ```
//!
//! Optional `[grouping]` and `[synth]` blocks configure the grouping run and
//! the synthetic generator.

use std::path::Path;

use serde::{Deserialize, Serialize};

use sedx_core::grouping::{GroupMetric, GroupingConfig, HoldoutSpec};
use sedx_core::model::SedxConfig;
use sedx_core::sarx::ExoProcess;
use sedx_core::series::SeasonalSpec;
use sedx_core::train::TrainConfig;

use crate::error::{CliError, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub spec: SpecBlock,
    pub model: ModelBlock,
    pub train: TrainBlock,
    pub eval: EvalBlock,
    #[serde(default)]
    pub grouping: Option<GroupingBlock>,
    #[serde(default)]
    pub synth: Option<SynthBlock>,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecBlock {
    pub p: usize,
    pub s: usize,
    pub seasonal_order: usize,
    pub q: Vec<usize>,
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sedx,
    Bedx,
    Sarx,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBlock {
    pub kind: ModelKind,
    #[serde(default = "default_hidden")]
    pub hidden: usize,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_true")]
    pub feed_context: bool,
    #[serde(default = "default_true")]
    pub include_encoder0_context: bool,
}

fn default_hidden() -> usize {
    8
}

fn default_layers() -> usize {
    1
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainBlock {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    #[serde(default = "default_true")]
    pub shuffle: bool,
    #[serde(default = "default_true")]
    pub deterministic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalBlock {
    /// Points held out at the end of each series for testing.
    pub test_len: usize,
    /// Points immediately before the test region, used for validation.
    pub val_len: usize,
    #[serde(default = "default_metric")]
    pub metric: GroupMetric,
}

fn default_metric() -> GroupMetric {
    GroupMetric::Mase
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupingBlock {
    pub e_th: f64,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: usize,
}

fn default_max_rounds() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthBlock {
    pub n_series: usize,
    pub length: usize,
    pub seed: u64,
    pub sigma_e: f64,
    /// Standard lag polynomial coefficients; length must equal `spec.p`.
    pub psi: Vec<f64>,
    /// Seasonal lag polynomial coefficients; length must equal
    /// `spec.seasonal_order`.
    pub seasonal_psi: Vec<f64>,
    #[serde(default)]
    pub intercept: f64,
    #[serde(default = "default_exo")]
    pub exo: ExoBlock,
    /// Weight on the current exogenous input in the generating regression.
    #[serde(default)]
    pub exo_weight: f64,
    /// Per-series affine disguise: y -> amp * y + shift with amp drawn from
    /// [scale_min, scale_max] and shift from [shift_min, shift_max].
    #[serde(default = "default_one")]
    pub scale_min: f64,
    #[serde(default = "default_one")]
    pub scale_max: f64,
    #[serde(default)]
    pub shift_min: f64,
    #[serde(default)]
    pub shift_max: f64,
}

fn default_one() -> f64 {
    1.0
}

fn default_exo() -> ExoBlock {
    ExoBlock {
        kind: ExoKind::None,
        phi: 0.0,
        sigma: 0.0,
        period: 0,
        amplitude: 0.0,
        noise: 0.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExoKind {
    None,
    Ar1,
    Sine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExoBlock {
    pub kind: ExoKind,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub period: usize,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub noise: f64,
}

impl ExoBlock {
    pub fn to_process(&self) -> ExoProcess {
        match self.kind {
            ExoKind::None => ExoProcess::None,
            ExoKind::Ar1 => ExoProcess::Ar1 {
                phi: self.phi,
                sigma: self.sigma,
            },
            ExoKind::Sine => ExoProcess::Sine {
                period: self.period.max(1),
                amplitude: self.amplitude,
                noise: self.noise,
            },
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        let config: RunConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if config.version != CONFIG_VERSION {
            return Err(CliError::Config {
                path: path.display().to_string(),
                message: format!(
                    "unsupported config version {} (expected {CONFIG_VERSION})",
                    config.version
                ),
            });
        }
        config.validate().map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(config)
    }

    pub fn validate(&self) -> sedx_core::Result<()> {
        self.seasonal_spec()?;
        self.train_config().validate()?;
        if self.eval.test_len <= self.spec.k || self.eval.val_len <= self.spec.k {
            return Err(sedx_core::Error::Config(format!(
                "eval: test_len and val_len (in points) must exceed K = {}",
                self.spec.k
            )));
        }
        if let Some(g) = &self.grouping {
            self.grouping_config(g).validate()?;
        }
        if let Some(s) = &self.synth {
            if s.n_series == 0 || s.length == 0 {
                return Err(sedx_core::Error::Config(
                    "synth: n_series and length must be >= 1".into(),
                ));
            }
            if s.scale_max < s.scale_min || s.shift_max < s.shift_min {
                return Err(sedx_core::Error::Config(
                    "synth: scale/shift ranges must be non-empty".into(),
                ));
            }
        }
        Ok(())
    }

    /// The seasonal spec used for windowing and models. For `kind = "bedx"`
    /// the degenerate spec is derived at model-building time, not here.
    pub fn seasonal_spec(&self) -> sedx_core::Result<SeasonalSpec> {
        SeasonalSpec::new(
            self.spec.p,
            self.spec.s,
            self.spec.seasonal_order,
            self.spec.q.clone(),
            self.spec.k,
        )
    }

    pub fn model_config(&self) -> SedxConfig {
        SedxConfig {
            hidden: self.model.hidden,
            layers: self.model.layers,
            feed_context: self.model.feed_context,
            include_encoder0_context: self.model.include_encoder0_context,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            batch_size: self.train.batch_size,
            learning_rate: self.train.learning_rate,
            epochs: self.train.epochs,
            seed: self.train.seed,
            shuffle: self.train.shuffle,
            deterministic: self.train.deterministic,
        }
    }

    /// Converts the point-based eval lengths into anchor counts: a region of
    /// `n` points admits `n - K` windows of width `K + 1`.
    pub fn holdout_spec(&self) -> HoldoutSpec {
        HoldoutSpec {
            test_len: self.eval.test_len - self.spec.k,
            val_len: self.eval.val_len - self.spec.k,
        }
    }

    pub fn grouping_config(&self, block: &GroupingBlock) -> GroupingConfig {
        GroupingConfig {
            error_threshold: block.e_th,
            metric: self.eval.metric,
            max_rounds: block.max_rounds,
        }
    }
}
