//! Greedy recursive construction of background models over a corpus.
//!
//! Every sequence is min-max scaled; one model is trained on all scaled
//! training windows of the current group; sequences whose validation error
//! (computed after unscaling) is at or below the threshold are covered by
//! that model, and the recursion continues on the rest. A round that covers
//! nothing — or exhausting the round budget — fits per-sequence linear SARX
//! fallback models instead.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SedxConfig, SedxParams};
use crate::sarx::{fit_sarx, lag_slots, SarxCoeffs};
use crate::scale::{scale, ScaleParams};
use crate::series::{SeasonalSpec, TimeSeries};
use crate::train::{per_sequence_validation_error, train, SeqValidation, TrainConfig};
use crate::window::{split_train_validation_test, enumerate_windows, SplitAnchors, WindowExample};

/// Which validation error decides coverage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupMetric {
    Mase,
    Mape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupingConfig {
    /// Threshold `E_th` on the per-sequence validation error.
    pub error_threshold: f64,
    pub metric: GroupMetric,
    /// Cap on background rounds; the remainder falls back to per-sequence
    /// models.
    pub max_rounds: usize,
}

impl GroupingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.error_threshold < 0.0 || !self.error_threshold.is_finite() {
            return Err(Error::Config(
                "grouping: error threshold must be finite and >= 0".into(),
            ));
        }
        if self.max_rounds == 0 {
            return Err(Error::Config("grouping: max_rounds must be >= 1".into()));
        }
        Ok(())
    }
}

/// Terminal holdout sizes, in anchors per sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoldoutSpec {
    pub test_len: usize,
    pub val_len: usize,
}

/// One model of the registry and the sequences it serves.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub model: RegistryModel,
    pub covered: Vec<String>,
    /// Recursion round that produced the entry (1-based).
    pub round: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum RegistryModel {
    /// Shared network predicting in the scaled domain.
    Background(Box<SedxParams>),
    /// Per-sequence linear model fit on the unscaled series.
    Fallback {
        coeffs: SarxCoeffs,
        spec: SeasonalSpec,
    },
}

impl RegistryEntry {
    pub fn is_background(&self) -> bool {
        matches!(self.model, RegistryModel::Background(_))
    }
}

/// Output of the grouping run: models plus per-sequence scaling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelRegistry {
    pub entries: Vec<RegistryEntry>,
    pub scales: BTreeMap<String, ScaleParams>,
}

impl ModelRegistry {
    pub fn entry_for(&self, id: &str) -> Option<&RegistryEntry> {
        self.entries
            .iter()
            .find(|e| e.covered.iter().any(|c| c == id))
    }

    /// Checks that `ids` are covered exactly once each.
    pub fn validate_partition<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<()> {
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for e in &self.entries {
            for id in &e.covered {
                *seen.entry(id).or_default() += 1;
            }
        }
        let mut missing = Vec::new();
        for id in ids {
            match seen.remove(id) {
                Some(1) => {}
                Some(n) => {
                    return Err(Error::Internal(format!(
                        "registry covers '{id}' {n} times"
                    )))
                }
                None => missing.push(id.to_string()),
            }
        }
        if !missing.is_empty() {
            return Err(Error::Internal(format!(
                "registry misses sequences: {missing:?}"
            )));
        }
        if !seen.is_empty() {
            return Err(Error::Internal(format!(
                "registry covers unknown sequences: {:?}",
                seen.keys().collect::<Vec<_>>()
            )));
        }
        Ok(())
    }

    pub fn background_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_background()).count()
    }
}

struct PreparedSequence {
    original: TimeSeries,
    scale: ScaleParams,
    split: SplitAnchors,
    train_windows: Vec<WindowExample>,
    validation: SeqValidation,
}

fn prepare_sequences(
    corpus: &[TimeSeries],
    spec: &SeasonalSpec,
    holdout: HoldoutSpec,
) -> Result<Vec<PreparedSequence>> {
    let slots = lag_slots(spec).len();
    let mut rejected = Vec::new();
    let mut prepared = Vec::new();
    for ts in corpus {
        let m = ts.exo_dim();
        let sarx_coeffs = 1 + slots + m * (slots + 1);
        match split_train_validation_test(ts, spec, holdout.test_len, holdout.val_len) {
            Err(e) => rejected.push(format!("'{}': {e}", ts.id)),
            Ok(split) => {
                if split.train.len() < sarx_coeffs {
                    rejected.push(format!(
                        "'{}': {} training anchors cannot fit a {sarx_coeffs}-coefficient fallback",
                        ts.id,
                        split.train.len()
                    ));
                    continue;
                }
                let (scaled, scale) = scale(ts)?;
                let train_windows = enumerate_windows(&scaled, spec, split.train.clone());
                let val_windows = enumerate_windows(&scaled, spec, split.validation.clone());
                let validation = SeqValidation {
                    series_id: ts.id.clone(),
                    windows: val_windows,
                    scale: scale.clone(),
                    train_reference: ts.y[..split.validation.start].to_vec(),
                };
                prepared.push(PreparedSequence {
                    original: ts.clone(),
                    scale,
                    split,
                    train_windows,
                    validation,
                });
            }
        }
    }
    if !rejected.is_empty() {
        return Err(Error::Config(format!(
            "grouping rejected {} unusable sequence(s): {}",
            rejected.len(),
            rejected.join("; ")
        )));
    }
    if prepared.is_empty() {
        return Err(Error::Config("grouping: empty corpus".into()));
    }
    let m0 = prepared[0].original.exo_dim();
    if prepared.iter().any(|p| p.original.exo_dim() != m0) {
        return Err(Error::Config(
            "grouping: sequences disagree on exogenous dimension".into(),
        ));
    }
    Ok(prepared)
}

fn fallback_entry(seq: &PreparedSequence, spec: &SeasonalSpec, round: usize) -> Result<RegistryEntry> {
    let anchors: Vec<usize> = seq.split.train.clone().collect();
    let fit = fit_sarx(&seq.original, spec, &anchors)?;
    Ok(RegistryEntry {
        model: RegistryModel::Fallback {
            coeffs: fit.coeffs,
            spec: spec.clone(),
        },
        covered: vec![seq.original.id.clone()],
        round,
    })
}

/// Runs the recursion and returns a registry whose entries partition the
/// corpus.
pub fn model_recursive(
    corpus: &[TimeSeries],
    spec: &SeasonalSpec,
    model_cfg: &SedxConfig,
    train_cfg: &TrainConfig,
    holdout: HoldoutSpec,
    gcfg: &GroupingConfig,
) -> Result<ModelRegistry> {
    spec.validate()?;
    gcfg.validate()?;
    train_cfg.validate()?;
    let prepared = prepare_sequences(corpus, spec, holdout)?;
    let exo_dim = prepared[0].original.exo_dim();

    let mut scales = BTreeMap::new();
    for p in &prepared {
        scales.insert(p.original.id.clone(), p.scale.clone());
    }

    let mut entries = Vec::new();
    let mut remaining: Vec<usize> = (0..prepared.len()).collect();

    for round in 1..=gcfg.max_rounds {
        let windows: Vec<WindowExample> = remaining
            .iter()
            .flat_map(|&i| prepared[i].train_windows.iter().cloned())
            .collect();
        let validation: Vec<SeqValidation> = remaining
            .iter()
            .map(|&i| prepared[i].validation.clone())
            .collect();

        // Decorrelate rounds while keeping the whole run a pure function of
        // the configured seed.
        let round_seed = train_cfg
            .seed
            .wrapping_add(round as u64)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut rng = ChaCha8Rng::seed_from_u64(round_seed);
        let model = SedxParams::init(spec.clone(), exo_dim, model_cfg.clone(), &mut rng)?;
        let round_cfg = TrainConfig {
            seed: round_seed,
            ..train_cfg.clone()
        };
        let outcome = train(model, &windows, &validation, &round_cfg)?;

        let mut covered = Vec::new();
        let mut rest = Vec::new();
        for &i in &remaining {
            let err = per_sequence_validation_error(
                &outcome.model,
                &prepared[i].validation,
                gcfg.metric == GroupMetric::Mape,
            )?;
            if err <= gcfg.error_threshold {
                covered.push(i);
            } else {
                rest.push(i);
            }
        }

        if covered.is_empty() {
            for &i in &remaining {
                entries.push(fallback_entry(&prepared[i], spec, round)?);
            }
            remaining.clear();
            break;
        }

        entries.push(RegistryEntry {
            model: RegistryModel::Background(Box::new(outcome.model)),
            covered: covered
                .iter()
                .map(|&i| prepared[i].original.id.clone())
                .collect(),
            round,
        });
        remaining = rest;
        if remaining.is_empty() {
            break;
        }
    }

    // Round budget exhausted with sequences left over.
    for &i in &remaining {
        entries.push(fallback_entry(&prepared[i], spec, gcfg.max_rounds)?);
    }

    let registry = ModelRegistry { entries, scales };
    registry.validate_partition(corpus.iter().map(|ts| ts.id.as_str()))?;
    Ok(registry)
}
