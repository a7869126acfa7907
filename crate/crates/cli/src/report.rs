//! Machine-readable result files: per-window metric rows as CSV and
//! line-oriented `key=value` summaries. Both are byte-stable across runs for
//! golden-file testing (BTreeMap ordering, shortest round-trip floats).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

/// One evaluated window. `mape` is empty in the CSV when undefined (zero
/// actuals in the window).
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub series_id: String,
    pub window_anchor: usize,
    pub mase: f64,
    pub mape: Option<f64>,
}

pub const RESULT_HEADER: [&str; 4] = ["series_id", "window_anchor", "mase", "mape"];

pub fn write_results(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(&RESULT_HEADER.join(","));
    out.push('\n');
    for r in rows {
        let mape = r.mape.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.series_id, r.window_anchor, r.mase, mape
        );
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path.display().to_string(), e))
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    let mut rows = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RESULT_HEADER.join(",") => {}
        other => {
            return Err(CliError::Parse {
                path: path.display().to_string(),
                row: 1,
                message: format!("bad result header: {other:?}"),
            })
        }
    }
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let row = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(CliError::Parse {
                path: path.display().to_string(),
                row,
                message: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.parse().map_err(|_| CliError::Parse {
                path: path.display().to_string(),
                row,
                message: format!("{what} '{s}' is not a number"),
            })
        };
        rows.push(ResultRow {
            series_id: fields[0].to_string(),
            window_anchor: parse(fields[1], "anchor")? as usize,
            mase: parse(fields[2], "mase")?,
            mape: if fields[3].is_empty() {
                None
            } else {
                Some(parse(fields[3], "mape")?)
            },
        });
    }
    Ok(rows)
}

/// Sorted `key=value` summary block.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.insert(key.into(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.render())
            .map_err(|e| CliError::io(path.display().to_string(), e))
    }

    pub fn parse(text: &str) -> Self {
        let mut kv = Self::new();
        for line in text.lines() {
            if let Some((k, v)) = line.split_once('=') {
                kv.set(k, v);
            }
        }
        kv
    }
}
