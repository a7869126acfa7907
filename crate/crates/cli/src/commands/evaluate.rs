//! `sedx evaluate`: score forecasts over the terminal test region, or compare
//! two result files (better-on-% tables plus Welch significance tests).

use std::collections::BTreeMap;
use std::path::Path;

use sedx_core::grouping::{ModelRegistry, RegistryModel};
use sedx_core::metrics::{
    compare_methods, mape, mase, welch_t, MetricSummary,
};
use sedx_core::sarx::{copy_previous, predict_sarx_recursive};
use sedx_core::series::{SeasonalSpec, TimeSeries};
use sedx_core::window::feasible_anchors;

use crate::config::RunConfig;
use crate::corpus::load_corpus;
use crate::error::{CliError, Result};
use crate::model_file::{ModelFile, ModelPayload, RegistryFile};
use crate::report::{read_results, write_results, KeyValues, ResultRow};

/// What produces the forecasts being scored.
pub enum Method {
    Model(Box<ModelFile>),
    Registry(Box<RegistryFile>),
    CopyPrevious,
}

pub struct EvaluateArgs<'a> {
    pub corpus: &'a Path,
    pub config: &'a RunConfig,
    pub method: Method,
    pub series: Option<&'a str>,
    pub out: &'a Path,
    pub summary: Option<&'a Path>,
}

pub fn run(args: &EvaluateArgs<'_>) -> Result<()> {
    let corpus = load_corpus(args.corpus)?;
    let (rows, summary) = evaluate_corpus(&corpus, args.config, &args.method, args.series)?;
    write_results(args.out, &rows)?;
    match args.summary {
        Some(path) => summary.write(path)?,
        None => print!("{}", summary.render()),
    }
    println!(
        "evaluate: {} windows -> {}",
        rows.len(),
        args.out.display()
    );
    Ok(())
}

/// The spec that shapes windows and the horizon for a method on a given
/// series.
fn method_spec<'a>(
    method: &'a Method,
    config: &RunConfig,
    id: &str,
) -> Result<std::borrow::Cow<'a, SeasonalSpec>> {
    use std::borrow::Cow;
    match method {
        Method::Model(file) => match &file.payload {
            ModelPayload::Sedx(m) => Ok(Cow::Borrowed(&m.spec)),
            ModelPayload::Sarx { spec, .. } => Ok(Cow::Borrowed(spec)),
        },
        Method::Registry(file) => {
            let entry = file.registry.entry_for(id).ok_or_else(|| {
                CliError::Usage(format!("registry does not cover series '{id}'"))
            })?;
            match &entry.model {
                RegistryModel::Background(m) => Ok(Cow::Borrowed(&m.spec)),
                RegistryModel::Fallback { spec, .. } => Ok(Cow::Borrowed(spec)),
            }
        }
        Method::CopyPrevious => Ok(Cow::Owned(config.seasonal_spec()?)),
    }
}

fn forecast(
    method: &Method,
    registry_scales: Option<&ModelRegistry>,
    ts: &TimeSeries,
    spec: &SeasonalSpec,
    anchor: usize,
) -> Result<Vec<f64>> {
    match method {
        Method::Model(file) => crate::commands::predict::predict_with(file, ts, Some(anchor)),
        Method::Registry(file) => {
            let registry = registry_scales.unwrap_or(&file.registry);
            let entry = registry.entry_for(&ts.id).expect("spec lookup succeeded");
            match &entry.model {
                RegistryModel::Background(model) => {
                    let scale = registry.scales.get(&ts.id).ok_or_else(|| {
                        CliError::Usage(format!("registry has no scale for '{}'", ts.id))
                    })?;
                    let scaled = scale.apply(ts)?;
                    let preds = model.predict_multi_step(&scaled, anchor)?;
                    Ok(scale.unscale_y_all(&preds))
                }
                RegistryModel::Fallback { coeffs, spec } => {
                    Ok(predict_sarx_recursive(coeffs, spec, ts, anchor, spec.k)?)
                }
            }
        }
        Method::CopyPrevious => Ok(copy_previous(ts, anchor, spec.k)?),
    }
}

/// Scores the method over the final `eval.test_len` points of each series.
pub fn evaluate_corpus(
    corpus: &[TimeSeries],
    config: &RunConfig,
    method: &Method,
    series: Option<&str>,
) -> Result<(Vec<ResultRow>, KeyValues)> {
    // Single-sequence model files evaluate their own sequence by default.
    let recorded = match method {
        Method::Model(file) => file.series_id.clone(),
        _ => None,
    };
    let selected: Vec<&TimeSeries> = match series.or(recorded.as_deref()) {
        Some(id) => vec![crate::commands::select_series(corpus, Some(id), None)?],
        None => corpus.iter().collect(),
    };

    let mut rows = Vec::new();
    let mut summary = KeyValues::new();
    let mut per_series_mase: BTreeMap<String, f64> = BTreeMap::new();
    let mut mape_defined = 0usize;
    let mut mape_total = 0usize;

    for ts in selected {
        let spec = method_spec(method, config, &ts.id)?;
        let k = spec.k;
        if config.eval.test_len <= k || ts.len() <= config.eval.test_len {
            return Err(CliError::Usage(format!(
                "series '{}': test region of {} points cannot hold width-{} windows",
                ts.id,
                config.eval.test_len,
                k + 1
            )));
        }
        let test_start = ts.len() - config.eval.test_len;
        let feasible = feasible_anchors(ts, &spec);
        let anchors: Vec<usize> = feasible.filter(|&t| t >= test_start).collect();
        if anchors.len() != config.eval.test_len - k {
            return Err(CliError::Usage(format!(
                "series '{}': only {} of {} test windows are feasible; series too short for the model orders",
                ts.id,
                anchors.len(),
                config.eval.test_len - k
            )));
        }
        let train_reference = &ts.y[..test_start];

        let mut seq_mase = Vec::new();
        for &anchor in &anchors {
            let preds = forecast(method, None, ts, &spec, anchor)?;
            let actuals = &ts.y[anchor..=anchor + k];
            let m = mase(&preds, actuals, train_reference, k + 1)?;
            let p = match mape(&preds, actuals) {
                Ok(v) => {
                    mape_defined += 1;
                    Some(v)
                }
                Err(sedx_core::Error::UndefinedMape { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            mape_total += 1;
            seq_mase.push(m);
            rows.push(ResultRow {
                series_id: ts.id.clone(),
                window_anchor: anchor,
                mase: m,
                mape: p,
            });
        }

        let s = MetricSummary::from_values(seq_mase.iter().copied())?;
        summary.set(format!("windows.{}", ts.id), anchors.len());
        summary.set(format!("mase.{}.mean", ts.id), s.avg);
        summary.set(format!("mase.{}.max", ts.id), s.max);
        summary.set(format!("mase.{}.min", ts.id), s.min);
        per_series_mase.insert(ts.id.clone(), s.avg);
    }

    let corpus_summary = MetricSummary::from_values(per_series_mase.values().copied())?;
    summary.set("mase.avg", corpus_summary.avg);
    summary.set("mase.max", corpus_summary.max);
    summary.set("mase.min", corpus_summary.min);
    summary.set("windows.total", rows.len());
    summary.set("mape.valid_windows", format!("{mape_defined}/{mape_total}"));
    Ok((rows, summary))
}

/// Compares two result files: better-on-% breakdowns over per-sequence mean
/// metrics plus Welch t-tests at the window level.
pub fn compare(a_path: &Path, b_path: &Path, names: (&str, &str)) -> Result<KeyValues> {
    let a = read_results(a_path)?;
    let b = read_results(b_path)?;
    let mut out = KeyValues::new();
    out.set("name.candidate", names.0);
    out.set("name.baseline", names.1);

    let per_seq_mean = |rows: &[ResultRow]| -> BTreeMap<String, f64> {
        let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for r in rows {
            let e = acc.entry(r.series_id.clone()).or_insert((0.0, 0));
            e.0 += r.mase;
            e.1 += 1;
        }
        acc.into_iter()
            .map(|(k, (sum, n))| (k, sum / n as f64))
            .collect()
    };
    let cand = per_seq_mean(&a);
    let base = per_seq_mean(&b);
    let cmp = compare_methods(&cand, &base)?;
    out.set("mase.candidate_better_pct", cmp.candidate_better_pct);
    if let Some((c, bl)) = cmp.avg_when_candidate_better {
        out.set("mase.avg_candidate_when_candidate_better", c);
        out.set("mase.avg_baseline_when_candidate_better", bl);
    }
    if let Some((c, bl)) = cmp.avg_when_baseline_better {
        out.set("mase.avg_candidate_when_baseline_better", c);
        out.set("mase.avg_baseline_when_baseline_better", bl);
    }

    let mase_a: Vec<f64> = a.iter().map(|r| r.mase).collect();
    let mase_b: Vec<f64> = b.iter().map(|r| r.mase).collect();
    let w = welch_t(&mase_a, &mase_b)?;
    out.set("welch.mase.t", w.t);
    out.set("welch.mase.dof", w.dof);
    out.set("welch.mase.p", w.p_two_sided);

    let mape_a: Vec<f64> = a.iter().filter_map(|r| r.mape).collect();
    let mape_b: Vec<f64> = b.iter().filter_map(|r| r.mape).collect();
    if mape_a.len() >= 2 && mape_b.len() >= 2 {
        if let Ok(w) = welch_t(&mape_a, &mape_b) {
            out.set("welch.mape.t", w.t);
            out.set("welch.mape.dof", w.dof);
            out.set("welch.mape.p", w.p_two_sided);
        }
    }
    Ok(out)
}
