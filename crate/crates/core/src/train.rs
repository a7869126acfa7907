//! Mini-batch BPTT training with RMSProp.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::mse_loss;
use crate::metrics;
use crate::model::{accumulate_grads, SedxParams};
use crate::params::{assign_from_flat, to_flat};
use crate::rmsprop::RmsProp;
use crate::scale::ScaleParams;
use crate::window::WindowExample;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
    /// Gradient reduction runs in a fixed sequential order; the flag is part
    /// of the contract so data-parallel implementations stay bit-compatible.
    pub deterministic: bool,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("train: batch_size must be >= 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("train: epochs must be >= 1".into()));
        }
        if self.learning_rate < 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::Config(
                "train: learning_rate must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Validation windows of one sequence, with what is needed to score them in
/// the original domain.
#[derive(Clone, Debug)]
pub struct SeqValidation {
    pub series_id: String,
    pub windows: Vec<WindowExample>,
    pub scale: ScaleParams,
    /// Unscaled training-segment values normalizing this sequence's MASE.
    pub train_reference: Vec<f64>,
}

/// Per-epoch training trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean squared error over all training windows, per epoch.
    pub train_loss: Vec<f64>,
    /// Mean validation MASE per epoch (when a validation set is given).
    pub val_mase: Vec<Option<f64>>,
    /// Mean validation MAPE per epoch over windows where it is defined.
    pub val_mape: Vec<Option<f64>>,
    /// Epoch whose weights were returned (lowest validation MASE).
    pub best_epoch: Option<usize>,
    pub wall_secs: f64,
}

/// Result of [`train`]: checkpointed weights plus the final-epoch weights.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Weights from the best-validation epoch (final weights when no
    /// validation set is given).
    pub model: SedxParams,
    pub final_model: SedxParams,
    pub report: TrainReport,
}

/// Sum of per-window losses and gradients over a batch.
///
/// Windows are reduced strictly in slice order, so the result is the exact
/// sum of per-example backward calls.
pub fn batch_gradient(
    model: &SedxParams,
    windows: &[&WindowExample],
) -> Result<(f64, SedxParams)> {
    let mut grads = model.zeros_like();
    let mut loss_sum = 0.0;
    for w in windows {
        let (preds, cache) = model.forward(w)?;
        let (loss, d_preds) = mse_loss(&preds, &w.targets)?;
        loss_sum += loss;
        let g = model.backward(&cache, &d_preds)?;
        accumulate_grads(&mut grads, &g);
    }
    Ok((loss_sum, grads))
}

/// Trains `model` on `windows` for `cfg.epochs` epochs of mini-batch RMSProp
/// over the mean window MSE, returning the best-validation weights.
pub fn train(
    model: SedxParams,
    windows: &[WindowExample],
    validation: &[SeqValidation],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if windows.is_empty() {
        return Err(Error::Config("train: no training windows".into()));
    }
    let started = Instant::now();
    let mut model = model;
    let mut flat = to_flat(&model);
    let mut opt = RmsProp::new(cfg.learning_rate, flat.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..windows.len()).collect();

    let mut report = TrainReport {
        train_loss: Vec::with_capacity(cfg.epochs),
        val_mase: Vec::with_capacity(cfg.epochs),
        val_mape: Vec::with_capacity(cfg.epochs),
        best_epoch: None,
        wall_secs: 0.0,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;

    for epoch in 0..cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let mut epoch_loss = 0.0;
        for (batch_idx, batch) in order.chunks(cfg.batch_size).enumerate() {
            let refs: Vec<&WindowExample> = batch.iter().map(|&i| &windows[i]).collect();
            let (loss_sum, grads) = batch_gradient(&model, &refs)?;
            if !loss_sum.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    batch: batch_idx,
                });
            }
            epoch_loss += loss_sum;
            let mut flat_grads = to_flat(&grads);
            let inv = 1.0 / batch.len() as f64;
            for g in &mut flat_grads {
                *g *= inv;
            }
            opt.update(&mut flat, &flat_grads)?;
            assign_from_flat(&mut model, &flat)?;
        }
        report.train_loss.push(epoch_loss / windows.len() as f64);

        if validation.is_empty() {
            report.val_mase.push(None);
            report.val_mape.push(None);
        } else {
            let (mase, mape) = validation_metrics(&model, validation)?;
            if best.as_ref().is_none_or(|(b, _)| mase < *b) {
                best = Some((mase, flat.clone()));
                report.best_epoch = Some(epoch);
            }
            report.val_mase.push(Some(mase));
            report.val_mape.push(mape);
        }
    }

    let final_model = model.clone();
    if let Some((_, best_flat)) = best {
        assign_from_flat(&mut model, &best_flat)?;
    }
    report.wall_secs = started.elapsed().as_secs_f64();
    Ok(TrainOutcome {
        model,
        final_model,
        report,
    })
}

/// Mean validation MASE across all windows (always defined given valid
/// references) and mean MAPE over the windows where it is defined.
pub fn validation_metrics(
    model: &SedxParams,
    validation: &[SeqValidation],
) -> Result<(f64, Option<f64>)> {
    let mut mase_sum = 0.0;
    let mut mase_n = 0usize;
    let mut mape_sum = 0.0;
    let mut mape_n = 0usize;
    let lag = model.spec.k + 1;
    for seq in validation {
        for w in &seq.windows {
            let (preds, _) = model.forward(w)?;
            let preds = seq.scale.unscale_y_all(&preds);
            let actuals = seq.scale.unscale_y_all(&w.targets);
            mase_sum += metrics::mase(&preds, &actuals, &seq.train_reference, lag)?;
            mase_n += 1;
            match metrics::mape(&preds, &actuals) {
                Ok(v) => {
                    mape_sum += v;
                    mape_n += 1;
                }
                Err(Error::UndefinedMape { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    if mase_n == 0 {
        return Err(Error::Config("validation set has no windows".into()));
    }
    let mape = (mape_n > 0).then(|| mape_sum / mape_n as f64);
    Ok((mase_sum / mase_n as f64, mape))
}

/// Per-sequence mean validation error in the unscaled domain, used by the
/// grouping recursion.
pub fn per_sequence_validation_error(
    model: &SedxParams,
    seq: &SeqValidation,
    use_mape: bool,
) -> Result<f64> {
    let lag = model.spec.k + 1;
    let mut sum = 0.0;
    let mut n = 0usize;
    for w in &seq.windows {
        let (preds, _) = model.forward(w)?;
        let preds = seq.scale.unscale_y_all(&preds);
        let actuals = seq.scale.unscale_y_all(&w.targets);
        sum += if use_mape {
            metrics::mape(&preds, &actuals)?
        } else {
            metrics::mase(&preds, &actuals, &seq.train_reference, lag)?
        };
        n += 1;
    }
    if n == 0 {
        return Err(Error::Config(format!(
            "sequence '{}' has no validation windows",
            seq.series_id
        )));
    }
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SedxConfig;
    use crate::series::{SeasonalSpec, TimeSeries};
    use crate::window::enumerate_windows;
    use rand::SeedableRng;

    fn toy_setup() -> (SedxParams, Vec<WindowExample>) {
        let spec = SeasonalSpec::new(2, 6, 1, vec![2], 1).unwrap();
        let y: Vec<f64> = (0..60)
            .map(|t| (t as f64 * std::f64::consts::TAU / 6.0).sin() * 0.4 + 0.5)
            .collect();
        let ts = TimeSeries::endogenous_only("toy", y).unwrap();
        let windows = enumerate_windows(&ts, &spec, 0..usize::MAX);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = SedxConfig {
            hidden: 4,
            layers: 1,
            ..SedxConfig::default()
        };
        let model = SedxParams::init(spec, 0, cfg, &mut rng).unwrap();
        (model, windows)
    }

    fn quick_cfg(lr: f64, epochs: usize) -> TrainConfig {
        TrainConfig {
            batch_size: 8,
            learning_rate: lr,
            epochs,
            seed: 7,
            shuffle: true,
            deterministic: true,
        }
    }

    #[test]
    fn single_window_overfits() {
        let (model, windows) = toy_setup();
        let one = vec![windows[0].clone()];
        let out = train(model, &one, &[], &quick_cfg(0.005, 2000)).unwrap();
        let last = *out.report.train_loss.last().unwrap();
        assert!(last < 1e-3, "final loss {last}");
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let (model, windows) = toy_setup();
        let cfg = quick_cfg(0.002, 3);
        let a = train(model.clone(), &windows, &[], &cfg).unwrap();
        let b = train(model, &windows, &[], &cfg).unwrap();
        assert_eq!(a.report.train_loss, b.report.train_loss);
        assert_eq!(to_flat(&a.model), to_flat(&b.model));
    }

    #[test]
    fn zero_learning_rate_changes_nothing() {
        let (model, windows) = toy_setup();
        let before = to_flat(&model);
        let out = train(model, &windows, &[], &quick_cfg(0.0, 3)).unwrap();
        assert_eq!(to_flat(&out.model), before);
        let losses = &out.report.train_loss;
        assert!((losses[0] - losses[2]).abs() < 1e-15);
    }

    #[test]
    fn batch_gradient_is_sum_of_examples() {
        let (model, windows) = toy_setup();
        let batch: Vec<&WindowExample> = windows[..4].iter().collect();
        let (loss, grads) = batch_gradient(&model, &batch).unwrap();
        let mut loss_sum = 0.0;
        let mut grad_sum = model.zeros_like();
        for w in &batch {
            let (l, g) = batch_gradient(&model, &[w]).unwrap();
            loss_sum += l;
            accumulate_grads(&mut grad_sum, &g);
        }
        assert!((loss - loss_sum).abs() < 1e-12);
        for (a, b) in to_flat(&grads).iter().zip(to_flat(&grad_sum)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn small_lr_single_batch_loss_non_increasing() {
        let (model, windows) = toy_setup();
        let few = &windows[..6];
        let cfg = TrainConfig {
            batch_size: 6,
            learning_rate: 1e-3,
            epochs: 20,
            seed: 3,
            shuffle: false,
            deterministic: true,
        };
        let out = train(model, few, &[], &cfg).unwrap();
        for pair in out.report.train_loss.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9, "loss went up: {pair:?}");
        }
    }

    #[test]
    fn report_lengths_match_epochs() {
        let (model, windows) = toy_setup();
        let out = train(model, &windows, &[], &quick_cfg(0.002, 5)).unwrap();
        assert_eq!(out.report.train_loss.len(), 5);
        assert_eq!(out.report.val_mase.len(), 5);
        assert_eq!(out.report.val_mape.len(), 5);
        assert!(out.report.best_epoch.is_none());
    }
}
