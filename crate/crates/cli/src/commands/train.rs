//! `sedx train`: fit one model (SEDX, BEDX, or SARX) on one sequence.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sedx_core::model::SedxParams;
use sedx_core::sarx::fit_sarx;
use sedx_core::train::train as train_model;

use crate::commands::{prepare_series, select_series};
use crate::config::{ModelKind, RunConfig};
use crate::corpus::load_corpus;
use crate::error::Result;
use crate::model_file::{Fingerprint, ModelFile, ModelPayload, MODEL_FORMAT_VERSION};

pub fn run(
    corpus_path: &Path,
    config: &RunConfig,
    out: &Path,
    series: Option<&str>,
) -> Result<()> {
    let corpus = load_corpus(corpus_path)?;
    let ts = select_series(&corpus, series, None)?;
    let base_spec = config.seasonal_spec()?;

    let file = match config.model.kind {
        ModelKind::Sarx => {
            let prepared = prepare_series(ts, &base_spec, config)?;
            let anchors: Vec<usize> = prepared.split.train.clone().collect();
            let fit = fit_sarx(ts, &base_spec, &anchors)?;
            println!(
                "train: sarx on '{}', {} anchors, residual variance {:.6e}",
                ts.id,
                anchors.len(),
                fit.sigma2
            );
            ModelFile {
                format_version: MODEL_FORMAT_VERSION,
                config: config.clone(),
                payload: ModelPayload::Sarx {
                    coeffs: fit.coeffs,
                    spec: base_spec,
                },
                scale: None,
                series_id: Some(ts.id.clone()),
                fingerprint: Fingerprint {
                    seed: config.train.seed,
                    epochs_completed: 0,
                    best_epoch: None,
                },
            }
        }
        kind => {
            // Network models window with the (possibly degenerate) spec.
            let spec = match kind {
                ModelKind::Bedx => base_spec.without_seasonal_structure(),
                _ => base_spec,
            };
            let prepared = prepare_series(ts, &spec, config)?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.train.seed);
            let model = match kind {
                ModelKind::Bedx => SedxParams::init_bedx(
                    &spec,
                    ts.exo_dim(),
                    config.model_config(),
                    &mut rng,
                )?,
                _ => SedxParams::init(spec, ts.exo_dim(), config.model_config(), &mut rng)?,
            };
            let outcome = train_model(
                model,
                &prepared.train_windows,
                std::slice::from_ref(&prepared.validation),
                &config.train_config(),
            )?;
            for (epoch, loss) in outcome.report.train_loss.iter().enumerate() {
                let val = outcome.report.val_mase[epoch]
                    .map(|v| format!(" val_mase={v:.6}"))
                    .unwrap_or_default();
                println!("epoch={epoch} train_loss={loss:.8}{val}");
            }
            if let Some(best) = outcome.report.best_epoch {
                println!("best_epoch={best}");
            }
            ModelFile {
                format_version: MODEL_FORMAT_VERSION,
                config: config.clone(),
                payload: ModelPayload::Sedx(Box::new(outcome.model)),
                scale: Some(prepared.scale),
                series_id: Some(ts.id.clone()),
                fingerprint: Fingerprint {
                    seed: config.train.seed,
                    epochs_completed: config.train.epochs,
                    best_epoch: outcome.report.best_epoch,
                },
            }
        }
    };

    file.save(out)?;
    println!("train: model written to {}", out.display());
    Ok(())
}
