//! `sedx predict`: multi-step forecasts from a saved model.

use std::fmt::Write as _;
use std::path::Path;

use sedx_core::sarx::predict_sarx_recursive;
use sedx_core::series::TimeSeries;
use sedx_core::window::feasible_anchors;

use crate::commands::select_series;
use crate::corpus::load_corpus;
use crate::error::{CliError, Result};
use crate::model_file::{ModelFile, ModelPayload};

pub fn run(
    model_path: &Path,
    corpus_path: &Path,
    out: &Path,
    series: Option<&str>,
    anchor: Option<usize>,
) -> Result<()> {
    let file = ModelFile::load(model_path)?;
    let corpus = load_corpus(corpus_path)?;
    let ts = select_series(&corpus, series, file.series_id.as_deref())?;
    let preds = predict_with(&file, ts, anchor)?;

    let anchor = resolve_anchor(&file, ts, anchor)?;
    let mut text = String::from("t,prediction\n");
    for (k, p) in preds.iter().enumerate() {
        let _ = writeln!(text, "{},{}", anchor + k, p);
    }
    std::fs::write(out, text).map_err(|e| CliError::io(out.display().to_string(), e))?;
    println!(
        "predict: {} steps from anchor {anchor} -> {}",
        preds.len(),
        out.display()
    );
    Ok(())
}

fn resolve_anchor(file: &ModelFile, ts: &TimeSeries, anchor: Option<usize>) -> Result<usize> {
    let spec = match &file.payload {
        ModelPayload::Sedx(m) => &m.spec,
        ModelPayload::Sarx { spec, .. } => spec,
    };
    match anchor {
        Some(a) => Ok(a),
        None => {
            let feasible = feasible_anchors(ts, spec);
            if feasible.is_empty() {
                return Err(CliError::Usage(format!(
                    "series '{}' is too short for this model's orders",
                    ts.id
                )));
            }
            Ok(feasible.end - 1)
        }
    }
}

/// Forecasts in the original domain at `anchor` (default: last feasible).
pub fn predict_with(file: &ModelFile, ts: &TimeSeries, anchor: Option<usize>) -> Result<Vec<f64>> {
    let anchor = resolve_anchor(file, ts, anchor)?;
    match &file.payload {
        ModelPayload::Sedx(model) => {
            let scale = file.scale.as_ref().ok_or_else(|| CliError::ModelFile {
                path: String::new(),
                message: "network model file is missing its scale parameters".into(),
            })?;
            let scaled = scale.apply(ts)?;
            let preds = model.predict_multi_step(&scaled, anchor)?;
            Ok(scale.unscale_y_all(&preds))
        }
        ModelPayload::Sarx { coeffs, spec } => {
            Ok(predict_sarx_recursive(coeffs, spec, ts, anchor, spec.k)?)
        }
    }
}
