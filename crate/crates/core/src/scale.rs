//! Per-sequence min-max scaling into [0, 1].

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::series::TimeSeries;

/// Per-channel minima and maxima of one sequence (y first, then each
/// exogenous channel).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    pub y_min: f64,
    pub y_max: f64,
    pub x_min: Vec<f64>,
    pub x_max: Vec<f64>,
}

impl ScaleParams {
    pub fn fit(ts: &TimeSeries) -> Self {
        let y_min = ts.y.iter().copied().fold(f64::INFINITY, f64::min);
        let y_max = ts.y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = ts.exo_dim();
        let mut x_min = vec![f64::INFINITY; m];
        let mut x_max = vec![f64::NEG_INFINITY; m];
        for row in &ts.x {
            for (c, v) in row.iter().enumerate() {
                x_min[c] = x_min[c].min(*v);
                x_max[c] = x_max[c].max(*v);
            }
        }
        ScaleParams {
            y_min,
            y_max,
            x_min,
            x_max,
        }
    }

    /// Scales one endogenous value; constant channels map to 0.
    pub fn scale_y(&self, v: f64) -> f64 {
        scale_one(v, self.y_min, self.y_max)
    }

    /// Inverts [`Self::scale_y`]; a constant channel returns its constant.
    pub fn unscale_y(&self, v: f64) -> f64 {
        unscale_one(v, self.y_min, self.y_max)
    }

    pub fn unscale_y_all(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.unscale_y(v)).collect()
    }

    /// Scales a series with these (possibly foreign) parameters, e.g. when
    /// predicting with a model trained under a saved scaling.
    pub fn apply(&self, ts: &TimeSeries) -> Result<TimeSeries> {
        if ts.exo_dim() != self.x_min.len() {
            return Err(crate::error::Error::DimMismatch(format!(
                "scale: {} exogenous channels vs {} in the series",
                self.x_min.len(),
                ts.exo_dim()
            )));
        }
        let y = ts.y.iter().map(|&v| self.scale_y(v)).collect();
        let x = ts
            .x
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(c, &v)| scale_one(v, self.x_min[c], self.x_max[c]))
                    .collect()
            })
            .collect();
        TimeSeries::new(ts.id.clone(), y, x)
    }
}

fn scale_one(v: f64, min: f64, max: f64) -> f64 {
    if max > min {
        (v - min) / (max - min)
    } else {
        0.0
    }
}

fn unscale_one(v: f64, min: f64, max: f64) -> f64 {
    if max > min {
        v * (max - min) + min
    } else {
        min
    }
}

/// Returns the scaled copy of `ts` together with the scaling parameters.
pub fn scale(ts: &TimeSeries) -> Result<(TimeSeries, ScaleParams)> {
    let params = ScaleParams::fit(ts);
    let y = ts.y.iter().map(|&v| params.scale_y(v)).collect();
    let x = ts
        .x
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, &v)| scale_one(v, params.x_min[c], params.x_max[c]))
                .collect()
        })
        .collect();
    let scaled = TimeSeries::new(ts.id.clone(), y, x)?;
    Ok((scaled, params))
}
