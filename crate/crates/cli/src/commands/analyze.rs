//! `sedx analyze`: per-series length, total variation, and ACF/PACF tables.

use std::fmt::Write as _;
use std::path::Path;

use sedx_core::metrics::total_variation;
use sedx_core::stats::{acf, pacf};

use crate::config::RunConfig;
use crate::corpus::{load_corpus, rank_by_total_variation};
use crate::error::{CliError, Result};
use crate::report::KeyValues;

pub struct AnalyzeArgs<'a> {
    pub corpus: &'a Path,
    pub config: &'a RunConfig,
    pub out: &'a Path,
    pub summary: Option<&'a Path>,
    pub max_lag: Option<usize>,
    pub top_fraction: Option<f64>,
}

pub fn run(args: &AnalyzeArgs<'_>) -> Result<()> {
    let corpus = load_corpus(args.corpus)?;
    let spec = args.config.seasonal_spec()?;

    let mut table = String::from("series_id,lag,acf,pacf\n");
    let mut summary = KeyValues::new();
    for ts in &corpus {
        let default_lag = (2 * spec.period).min(ts.len().saturating_sub(1) / 2);
        let max_lag = args.max_lag.unwrap_or(default_lag).max(1);
        if max_lag >= ts.len() {
            return Err(CliError::Usage(format!(
                "series '{}' has {} points, cannot compute {max_lag} lags",
                ts.id,
                ts.len()
            )));
        }
        let a = acf(&ts.y, max_lag)?;
        let p = pacf(&ts.y, max_lag)?;
        for lag in 0..=max_lag {
            let _ = writeln!(table, "{},{},{},{}", ts.id, lag, a[lag], p[lag]);
        }
        summary.set(format!("len.{}", ts.id), ts.len());
        summary.set(format!("tv.{}", ts.id), total_variation(&ts.y));
        // Lags with |pacf| beyond the 2/sqrt(n) band, largest lags included,
        // as order-selection hints.
        let band = 2.0 / (ts.len() as f64).sqrt();
        let significant: Vec<String> = (1..=max_lag)
            .filter(|&l| p[l].abs() > band)
            .map(|l| l.to_string())
            .collect();
        summary.set(format!("pacf_significant.{}", ts.id), significant.join(" "));
    }

    if let Some(fraction) = args.top_fraction {
        let top = rank_by_total_variation(&corpus, fraction);
        for (rank, ts) in top.iter().enumerate() {
            summary.set(format!("tv_top.{rank:03}"), &ts.id);
        }
        summary.set("tv_top.count", top.len());
    }

    std::fs::write(args.out, table)
        .map_err(|e| CliError::io(args.out.display().to_string(), e))?;
    match args.summary {
        Some(path) => summary.write(path)?,
        None => print!("{}", summary.render()),
    }
    println!("analyze: {} series -> {}", corpus.len(), args.out.display());
    Ok(())
}
