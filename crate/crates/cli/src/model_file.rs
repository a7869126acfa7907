//! Versioned persistence for trained models and grouping registries.
//!
//! JSON keeps every `f64` bit-exact (shortest round-trip encoding), so a
//! loaded model reproduces its predictions exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use sedx_core::grouping::ModelRegistry;
use sedx_core::model::SedxParams;
use sedx_core::sarx::SarxCoeffs;
use sedx_core::scale::ScaleParams;
use sedx_core::series::SeasonalSpec;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    /// Echo of the configuration the model was produced under.
    pub config: RunConfig,
    pub payload: ModelPayload,
    /// Scaling the network was trained under (network models only).
    pub scale: Option<ScaleParams>,
    /// Sequence the model was trained on, when single-sequence.
    pub series_id: Option<String>,
    pub fingerprint: Fingerprint,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ModelPayload {
    Sedx(Box<SedxParams>),
    Sarx {
        coeffs: SarxCoeffs,
        spec: SeasonalSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub seed: u64,
    pub epochs_completed: usize,
    pub best_epoch: Option<usize>,
}

impl ModelFile {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        save_json(path, self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file: ModelFile = load_json(path.as_ref())?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(CliError::ModelFile {
                path: path.as_ref().display().to_string(),
                message: format!(
                    "unsupported format version {} (expected {MODEL_FORMAT_VERSION})",
                    file.format_version
                ),
            });
        }
        Ok(file)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegistryFile {
    pub format_version: u32,
    pub config: RunConfig,
    pub registry: ModelRegistry,
}

impl RegistryFile {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        save_json(path, self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file: RegistryFile = load_json(path.as_ref())?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(CliError::ModelFile {
                path: path.as_ref().display().to_string(),
                message: format!(
                    "unsupported format version {} (expected {MODEL_FORMAT_VERSION})",
                    file.format_version
                ),
            });
        }
        Ok(file)
    }
}

fn save_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(value).map_err(|e| CliError::ModelFile {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    std::fs::write(path, json).map_err(|e| CliError::io(path.display().to_string(), e))
}

fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::ModelFile {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
