//! Corpus CSV ingestion and emission.
//!
//! Format: header `series_id,t,y,x1,...,xm`, rows sorted by `(series_id, t)`
//! with `t` contiguous integers per series and the same exogenous width
//! everywhere.

use std::collections::BTreeSet;
use std::path::Path;

use sedx_core::metrics::total_variation;
use sedx_core::series::TimeSeries;

use crate::error::{CliError, Result};

fn parse_err(path: &Path, row: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        row,
        message: message.into(),
    }
}

/// Loads and validates a corpus file; series come back in file order.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<TimeSeries>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            row: 1,
            message: e.to_string(),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 3 || cols[0] != "series_id" || cols[1] != "t" || cols[2] != "y" {
        return Err(parse_err(
            path,
            1,
            format!("header must start with series_id,t,y (got {cols:?})"),
        ));
    }
    let m = cols.len() - 3;
    for (j, col) in cols[3..].iter().enumerate() {
        let expected = format!("x{}", j + 1);
        if *col != expected {
            return Err(parse_err(
                path,
                1,
                format!("exogenous column {} must be named '{expected}'", j + 4),
            ));
        }
    }

    struct Block {
        id: String,
        last_t: i64,
        y: Vec<f64>,
        x: Vec<Vec<f64>>,
    }

    let mut corpus: Vec<TimeSeries> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut current: Option<Block> = None;

    let flush = |current: &mut Option<Block>, corpus: &mut Vec<TimeSeries>, row: usize| -> Result<()> {
        if let Some(block) = current.take() {
            let ts = TimeSeries::new(block.id, block.y, block.x)
                .map_err(|e| parse_err(path, row, e.to_string()))?;
            corpus.push(ts);
        }
        Ok(())
    };

    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // 1-based rows, counting the header
        let record = record.map_err(|e| parse_err(path, row, e.to_string()))?;
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(parse_err(path, row, "empty series_id"));
        }
        let t: i64 = record[1]
            .parse()
            .map_err(|_| parse_err(path, row, format!("t '{}' is not an integer", &record[1])))?;
        let y: f64 = record[2]
            .parse()
            .map_err(|_| parse_err(path, row, format!("y '{}' is not a number", &record[2])))?;
        let mut x = Vec::with_capacity(m);
        for j in 0..m {
            let v: f64 = record[3 + j].parse().map_err(|_| {
                parse_err(
                    path,
                    row,
                    format!("x{} '{}' is not a number", j + 1, &record[3 + j]),
                )
            })?;
            x.push(v);
        }

        match &mut current {
            Some(block) if block.id == id => {
                if t != block.last_t + 1 {
                    return Err(parse_err(
                        path,
                        row,
                        format!("series '{id}': t jumps from {} to {t}", block.last_t),
                    ));
                }
                block.last_t = t;
                block.y.push(y);
                block.x.push(x);
            }
            _ => {
                flush(&mut current, &mut corpus, row)?;
                if !seen.insert(id.clone()) {
                    return Err(parse_err(
                        path,
                        row,
                        format!("series '{id}' appears in more than one block; rows must be sorted by (series_id, t)"),
                    ));
                }
                current = Some(Block {
                    id,
                    last_t: t,
                    y: vec![y],
                    x: vec![x],
                });
            }
        }
    }
    flush(&mut current, &mut corpus, 0)?;

    if corpus.is_empty() {
        return Err(parse_err(path, 2, "corpus has no data rows"));
    }
    Ok(corpus)
}

/// Writes a corpus with `t` starting at 0 for every series.
pub fn write_corpus(path: impl AsRef<Path>, corpus: &[TimeSeries]) -> Result<()> {
    let path = path.as_ref();
    let m = corpus.first().map_or(0, TimeSeries::exo_dim);
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::io(path.display().to_string(), std::io::Error::other(e)))?;
    let mut header = vec!["series_id".to_string(), "t".to_string(), "y".to_string()];
    for j in 0..m {
        header.push(format!("x{}", j + 1));
    }
    let io_err =
        |e: csv::Error| CliError::io(path.display().to_string(), std::io::Error::other(e));
    writer.write_record(&header).map_err(io_err)?;
    for ts in corpus {
        for (t, y) in ts.y.iter().enumerate() {
            let mut record = vec![ts.id.clone(), t.to_string(), y.to_string()];
            for v in &ts.x[t] {
                record.push(v.to_string());
            }
            writer.write_record(&record).map_err(io_err)?;
        }
    }
    writer
        .flush()
        .map_err(|e| CliError::io(path.display().to_string(), e))?;
    Ok(())
}

/// The `top_fraction` share of sequences with the largest endogenous total
/// variation, descending; ties break lexicographically by id.
pub fn rank_by_total_variation(corpus: &[TimeSeries], top_fraction: f64) -> Vec<TimeSeries> {
    let mut ranked: Vec<&TimeSeries> = corpus.iter().collect();
    ranked.sort_by(|a, b| {
        let (tva, tvb) = (total_variation(&a.y), total_variation(&b.y));
        tvb.partial_cmp(&tva)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.id.cmp(&b.id))
    });
    let keep = (corpus.len() as f64 * top_fraction.clamp(0.0, 1.0)).round() as usize;
    ranked.into_iter().take(keep).cloned().collect()
}
