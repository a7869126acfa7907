//! Time series and the seasonal model orders that drive lag bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sequence: endogenous values `y(t)` plus an exogenous vector `x(t)`
/// per time step. The exogenous dimension may be zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub id: String,
    pub y: Vec<f64>,
    pub x: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(id: impl Into<String>, y: Vec<f64>, x: Vec<Vec<f64>>) -> Result<Self> {
        let id = id.into();
        if y.is_empty() {
            return Err(Error::Config(format!("series '{id}' is empty")));
        }
        if y.len() != x.len() {
            return Err(Error::Config(format!(
                "series '{id}': {} y values vs {} x rows",
                y.len(),
                x.len()
            )));
        }
        let m = x[0].len();
        if x.iter().any(|row| row.len() != m) {
            return Err(Error::Config(format!(
                "series '{id}': exogenous rows have mixed widths"
            )));
        }
        if y.iter().any(|v| !v.is_finite()) || x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "series '{id}' contains non-finite values"
            )));
        }
        Ok(TimeSeries { id, y, x })
    }

    /// Series without exogenous inputs.
    pub fn endogenous_only(id: impl Into<String>, y: Vec<f64>) -> Result<Self> {
        let x = vec![Vec::new(); y.len()];
        Self::new(id, y, x)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn exo_dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }
}

/// Model orders `(p, S, P, Q_1..Q_P, K)`.
///
/// - `p`: standard auto-regressive order (encoder 0 length),
/// - `period`: seasonal cycle length `S`,
/// - `seasonal_order`: number of whole cycles `P` drawn on (one encoder per
///   cycle); `P = 0` is the degenerate spec used by the BEDX ablation,
/// - `group_sizes`: per-cycle group sizes `Q_1..Q_P` (encoder `i` length),
/// - `k`: the decoder unrolls `k + 1` steps and predicts `y(t) .. y(t+k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeasonalSpec {
    pub p: usize,
    pub period: usize,
    pub seasonal_order: usize,
    pub group_sizes: Vec<usize>,
    pub k: usize,
}

impl SeasonalSpec {
    pub fn new(
        p: usize,
        period: usize,
        seasonal_order: usize,
        group_sizes: Vec<usize>,
        k: usize,
    ) -> Result<Self> {
        let spec = SeasonalSpec {
            p,
            period,
            seasonal_order,
            group_sizes,
            k,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(Error::Config("spec: p must be >= 1".into()));
        }
        if self.period < 2 {
            return Err(Error::Config("spec: period S must be >= 2".into()));
        }
        if self.p >= self.period {
            return Err(Error::Config(format!(
                "spec: p = {} must be < period S = {}",
                self.p, self.period
            )));
        }
        if self.group_sizes.len() != self.seasonal_order {
            return Err(Error::Config(format!(
                "spec: {} group sizes for seasonal order P = {}",
                self.group_sizes.len(),
                self.seasonal_order
            )));
        }
        if self.group_sizes.contains(&0) {
            return Err(Error::Config("spec: every Q_i must be >= 1".into()));
        }
        // For k >= S the decoder's lag-S input would be a future value.
        if self.k + 1 > self.period {
            return Err(Error::Config(format!(
                "spec: horizon K+1 = {} exceeds period S = {}",
                self.k + 1,
                self.period
            )));
        }
        Ok(())
    }

    /// Same orders with all seasonal structure removed (the BEDX ablation).
    pub fn without_seasonal_structure(&self) -> SeasonalSpec {
        SeasonalSpec {
            p: self.p,
            period: self.period,
            seasonal_order: 0,
            group_sizes: Vec::new(),
            k: self.k,
        }
    }

    /// Earliest anchor with full history for every encoder and decoder slot.
    pub fn first_feasible_anchor(&self) -> usize {
        let mut earliest = self.p;
        for (i, &q) in self.group_sizes.iter().enumerate() {
            earliest = earliest.max((i + 1) * self.period + q);
        }
        earliest
    }

    /// Shortest series that admits at least one window.
    pub fn min_series_len(&self) -> usize {
        self.first_feasible_anchor() + self.k + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_invariants_enforced() {
        assert!(SeasonalSpec::new(2, 4, 1, vec![1], 1).is_ok());
        // p >= S
        assert!(SeasonalSpec::new(4, 4, 1, vec![1], 1).is_err());
        // K+1 > S
        assert!(SeasonalSpec::new(1, 4, 1, vec![1], 4).is_err());
        // Q length mismatch
        assert!(SeasonalSpec::new(1, 4, 2, vec![1], 1).is_err());
        // zero group size
        assert!(SeasonalSpec::new(1, 4, 1, vec![0], 1).is_err());
        // degenerate BEDX spec
        assert!(SeasonalSpec::new(2, 4, 0, vec![], 1).is_ok());
    }

    #[test]
    fn first_feasible_anchor_tracks_deepest_lag() {
        let spec = SeasonalSpec::new(2, 4, 1, vec![1], 1).unwrap();
        assert_eq!(spec.first_feasible_anchor(), 5);
        let spec = SeasonalSpec::new(3, 10, 2, vec![4, 1], 2).unwrap();
        // max(3, 10+4, 20+1) = 21
        assert_eq!(spec.first_feasible_anchor(), 21);
        let bedx = spec.without_seasonal_structure();
        assert_eq!(bedx.first_feasible_anchor(), 3);
    }

    #[test]
    fn series_validation() {
        assert!(TimeSeries::new("a", vec![1.0], vec![vec![1.0]]).is_ok());
        assert!(TimeSeries::new("a", vec![1.0, 2.0], vec![vec![1.0]]).is_err());
        assert!(TimeSeries::new("a", vec![f64::NAN], vec![vec![]]).is_err());
        assert!(TimeSeries::new("a", vec![1.0, 2.0], vec![vec![1.0], vec![]]).is_err());
        let s = TimeSeries::endogenous_only("b", vec![1.0, 2.0]).unwrap();
        assert_eq!(s.exo_dim(), 0);
    }
}
