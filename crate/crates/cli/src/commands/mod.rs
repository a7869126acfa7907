//! Command implementations behind the `sedx` binary.

pub mod analyze;
pub mod evaluate;
pub mod group;
pub mod predict;
pub mod synth;
pub mod train;

use sedx_core::scale::{scale, ScaleParams};
use sedx_core::series::{SeasonalSpec, TimeSeries};
use sedx_core::train::SeqValidation;
use sedx_core::window::{enumerate_windows, split_train_validation_test, SplitAnchors, WindowExample};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Picks the series to operate on: the explicit id, the model's recorded id,
/// or the only series in the corpus.
pub(crate) fn select_series<'a>(
    corpus: &'a [TimeSeries],
    requested: Option<&str>,
    recorded: Option<&str>,
) -> Result<&'a TimeSeries> {
    let wanted = requested.or(recorded);
    match wanted {
        Some(id) => corpus.iter().find(|ts| ts.id == id).ok_or_else(|| {
            CliError::Usage(format!("series '{id}' is not in the corpus"))
        }),
        None if corpus.len() == 1 => Ok(&corpus[0]),
        None => Err(CliError::Usage(format!(
            "corpus has {} series; pass --series",
            corpus.len()
        ))),
    }
}

/// Scaled windows plus everything needed to score validation in the original
/// domain, for one sequence.
pub(crate) struct PreparedSeries {
    pub scale: ScaleParams,
    pub split: SplitAnchors,
    pub train_windows: Vec<WindowExample>,
    pub validation: SeqValidation,
}

pub(crate) fn prepare_series(
    ts: &TimeSeries,
    spec: &SeasonalSpec,
    config: &RunConfig,
) -> Result<PreparedSeries> {
    let holdout = config.holdout_spec();
    let split = split_train_validation_test(ts, spec, holdout.test_len, holdout.val_len)?;
    let (scaled, scale) = scale(ts)?;
    let train_windows = enumerate_windows(&scaled, spec, split.train.clone());
    let validation = SeqValidation {
        series_id: ts.id.clone(),
        windows: enumerate_windows(&scaled, spec, split.validation.clone()),
        scale: scale.clone(),
        train_reference: ts.y[..split.validation.start].to_vec(),
    };
    Ok(PreparedSeries {
        scale,
        split,
        train_windows,
        validation,
    })
}
