//! Window assembly: one training or prediction instance per anchor.
//!
//! For an anchor `t`, the inputs split into three kinds of blocks:
//!
//! - encoder 0 reads the `p` standard lags `t-p .. t-1`,
//! - encoder `i` (1-based) reads the `Q_i` lags `t-iS-Q_i .. t-iS-1`
//!   immediately preceding the seasonal anchor `t-iS`,
//! - decoder step `k` reads the future exogenous `x(t+k)` plus the
//!   synchronized pair `(x, y)` at `t+k-iS` for every cycle `i`.
//!
//! Every encoder feeds values oldest-first as `[x(tau), y(tau)]` rows, so the
//! final hidden state summarizes the most recent point of its block. Targets
//! are `y(t) .. y(t+K)`.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{SeasonalSpec, TimeSeries};

/// One assembled window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowExample {
    /// `P + 1` input sequences; element `[e][s]` is the step-`s` input vector
    /// of encoder `e`.
    pub encoder_inputs: Vec<Vec<Vec<f64>>>,
    /// `K + 1` decoder step vectors.
    pub decoder_inputs: Vec<Vec<f64>>,
    /// `y(t) .. y(t+K)`.
    pub targets: Vec<f64>,
    /// Time index of the first target.
    pub anchor: usize,
}

fn step_vector(ts: &TimeSeries, tau: usize) -> Vec<f64> {
    let mut v = ts.x[tau].clone();
    v.push(ts.y[tau]);
    v
}

/// Builds the window anchored at `t`, checking history and horizon bounds.
pub fn assemble_window(ts: &TimeSeries, spec: &SeasonalSpec, t: usize) -> Result<WindowExample> {
    spec.validate()?;
    let first = spec.first_feasible_anchor();
    if t < first {
        return Err(Error::WindowOutOfRange {
            anchor: t,
            bound: format!("needs t >= {first} to cover the deepest lag"),
        });
    }
    if t + spec.k > ts.len() - 1 {
        return Err(Error::WindowOutOfRange {
            anchor: t,
            bound: format!(
                "target horizon t+K = {} exceeds last index {}",
                t + spec.k,
                ts.len() - 1
            ),
        });
    }

    let mut encoder_inputs = Vec::with_capacity(spec.seasonal_order + 1);
    encoder_inputs.push((t - spec.p..t).map(|tau| step_vector(ts, tau)).collect());
    for (i, &q) in spec.group_sizes.iter().enumerate() {
        let anchor_lag = (i + 1) * spec.period;
        let block = (t - anchor_lag - q..t - anchor_lag)
            .map(|tau| step_vector(ts, tau))
            .collect();
        encoder_inputs.push(block);
    }

    let mut decoder_inputs = Vec::with_capacity(spec.k + 1);
    for k in 0..=spec.k {
        let mut v = ts.x[t + k].clone();
        for i in 1..=spec.seasonal_order {
            let tau = t + k - i * spec.period;
            v.extend_from_slice(&ts.x[tau]);
            v.push(ts.y[tau]);
        }
        decoder_inputs.push(v);
    }

    let targets = ts.y[t..=t + spec.k].to_vec();

    Ok(WindowExample {
        encoder_inputs,
        decoder_inputs,
        targets,
        anchor: t,
    })
}

/// Anchors at which a window can be assembled, as a half-open range.
pub fn feasible_anchors(ts: &TimeSeries, spec: &SeasonalSpec) -> Range<usize> {
    let first = spec.first_feasible_anchor();
    if ts.len() < spec.min_series_len() {
        return first..first;
    }
    first..ts.len() - spec.k
}

/// One window per feasible anchor inside `anchors`.
pub fn enumerate_windows(
    ts: &TimeSeries,
    spec: &SeasonalSpec,
    anchors: Range<usize>,
) -> Vec<WindowExample> {
    let feasible = feasible_anchors(ts, spec);
    let lo = anchors.start.max(feasible.start);
    let hi = anchors.end.min(feasible.end);
    (lo..hi)
        .map(|t| assemble_window(ts, spec, t).expect("anchor inside feasible range"))
        .collect()
}

/// Anchor ranges of a terminal train / validation / test split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitAnchors {
    pub train: Range<usize>,
    pub validation: Range<usize>,
    pub test: Range<usize>,
}

/// Carves the feasible anchors into train / validation / test blocks.
///
/// `test_len` and `val_len` count anchors. Test takes the final `test_len`
/// anchors; validation the `val_len` ending `K` anchors earlier, so no
/// validation target index reaches the first test target; train ends `K`
/// anchors before validation for the same reason.
pub fn split_train_validation_test(
    ts: &TimeSeries,
    spec: &SeasonalSpec,
    test_len: usize,
    val_len: usize,
) -> Result<SplitAnchors> {
    if test_len == 0 || val_len == 0 {
        return Err(Error::Config(
            "split: test_len and val_len must be >= 1".into(),
        ));
    }
    let feasible = feasible_anchors(ts, spec);
    let total = feasible.len();
    let needed = test_len + val_len + 2 * spec.k + 1;
    if total < needed {
        return Err(Error::Config(format!(
            "split exhausts feasible anchors: {total} available, {needed} needed \
             (test {test_len} + val {val_len} + 2K gap + 1 train)"
        )));
    }
    let test_start = feasible.end - test_len;
    let val_end = test_start - spec.k;
    let val_start = val_end - val_len;
    let train_end = val_start - spec.k;
    Ok(SplitAnchors {
        train: feasible.start..train_end,
        validation: val_start..val_end,
        test: test_start..feasible.end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::SeasonalSpec;

    fn ramp_series(len: usize, exo_dim: usize) -> TimeSeries {
        // y(t) = t, x_j(t) = 100*(j+1) + t: every slot value names its index.
        let y = (0..len).map(|t| t as f64).collect();
        let x = (0..len)
            .map(|t| {
                (0..exo_dim)
                    .map(|j| 100.0 * (j + 1) as f64 + t as f64)
                    .collect()
            })
            .collect();
        TimeSeries::new("ramp", y, x).unwrap()
    }

    #[test]
    fn worked_example_indices() {
        // p=2, S=4, P=1, Q=[1], K=1, t=9 on an 11-point series.
        let ts = ramp_series(11, 1);
        let spec = SeasonalSpec::new(2, 4, 1, vec![1], 1).unwrap();
        let w = assemble_window(&ts, &spec, 9).unwrap();
        assert_eq!(w.encoder_inputs.len(), 2);
        // encoder 0 covers tau = 7, 8
        assert_eq!(w.encoder_inputs[0], vec![vec![107.0, 7.0], vec![108.0, 8.0]]);
        // encoder 1 covers tau = 4
        assert_eq!(w.encoder_inputs[1], vec![vec![104.0, 4.0]]);
        // decoder step 0 = [x(9), x(5), y(5)]; step 1 = [x(10), x(6), y(6)]
        assert_eq!(w.decoder_inputs[0], vec![109.0, 105.0, 5.0]);
        assert_eq!(w.decoder_inputs[1], vec![110.0, 106.0, 6.0]);
        assert_eq!(w.targets, vec![9.0, 10.0]);
    }

    #[test]
    fn short_worked_example() {
        // p=1, S=2, P=1, Q=[1], K=0, t=3.
        let ts = ramp_series(5, 1);
        let spec = SeasonalSpec::new(1, 2, 1, vec![1], 0).unwrap();
        let w = assemble_window(&ts, &spec, 3).unwrap();
        assert_eq!(w.encoder_inputs[0], vec![vec![102.0, 2.0]]);
        assert_eq!(w.encoder_inputs[1], vec![vec![100.0, 0.0]]);
        assert_eq!(w.decoder_inputs, vec![vec![103.0, 101.0, 1.0]]);
        assert_eq!(w.targets, vec![3.0]);
    }

    #[test]
    fn no_exogenous_decoder_slots() {
        let ts = ramp_series(30, 0);
        let spec = SeasonalSpec::new(2, 4, 2, vec![1, 1], 1).unwrap();
        let w = assemble_window(&ts, &spec, 12).unwrap();
        // decoder step k = [y(t+k-S), y(t+k-2S)], dim P
        assert_eq!(w.decoder_inputs[0], vec![8.0, 4.0]);
        assert_eq!(w.decoder_inputs[1], vec![9.0, 5.0]);
        assert_eq!(w.encoder_inputs[0][0], vec![10.0]);
    }

    #[test]
    fn window_count_matches_bound_arithmetic() {
        let spec = SeasonalSpec::new(2, 4, 1, vec![1], 1).unwrap();
        let ts = ramp_series(11, 1);
        // first feasible = max(2, 4+1) = 5, last = 11-1-1 = 9.
        let ws = enumerate_windows(&ts, &spec, 0..usize::MAX);
        assert_eq!(ws.len(), 5);
        assert_eq!(ws.first().unwrap().anchor, 5);
        assert_eq!(ws.last().unwrap().anchor, 9);
        // Consecutive anchors differ by one.
        for pair in ws.windows(2) {
            assert_eq!(pair[1].anchor, pair[0].anchor + 1);
        }
        // One more point, one more window.
        let longer = ramp_series(12, 1);
        assert_eq!(enumerate_windows(&longer, &spec, 0..usize::MAX).len(), 6);
        // Too short: empty.
        let short = ramp_series(6, 1);
        assert!(enumerate_windows(&short, &spec, 0..usize::MAX).is_empty());
    }

    #[test]
    fn out_of_range_anchors_name_the_bound() {
        let ts = ramp_series(11, 1);
        let spec = SeasonalSpec::new(2, 4, 1, vec![1], 1).unwrap();
        match assemble_window(&ts, &spec, 4) {
            Err(Error::WindowOutOfRange { anchor: 4, bound }) => {
                assert!(bound.contains("t >= 5"), "{bound}");
            }
            other => panic!("expected out-of-range, got {other:?}"),
        }
        match assemble_window(&ts, &spec, 10) {
            Err(Error::WindowOutOfRange { anchor: 10, bound }) => {
                assert!(bound.contains("horizon"), "{bound}");
            }
            other => panic!("expected out-of-range, got {other:?}"),
        }
    }

    #[test]
    fn split_blocks_are_ordered_and_sized() {
        // K=0: splits are contiguous; 10 feasible anchors, test 4, val 2.
        let spec = SeasonalSpec::new(1, 2, 1, vec![1], 0).unwrap();
        // first feasible = 3; need len so that 3..len gives 10 anchors.
        let ts = ramp_series(13, 0);
        let split = split_train_validation_test(&ts, &spec, 4, 2).unwrap();
        assert_eq!(split.test, 9..13);
        assert_eq!(split.validation, 7..9);
        assert_eq!(split.train, 3..7);
    }

    #[test]
    fn split_keeps_targets_separated() {
        let spec = SeasonalSpec::new(2, 8, 1, vec![2], 3).unwrap();
        let ts = ramp_series(60, 0);
        let split = split_train_validation_test(&ts, &spec, 5, 4).unwrap();
        let last_train_target = split.train.end - 1 + spec.k;
        let first_val_target = split.validation.start;
        let last_val_target = split.validation.end - 1 + spec.k;
        let first_test_target = split.test.start;
        assert!(last_train_target < first_val_target);
        assert!(last_val_target < first_test_target);
    }

    #[test]
    fn exhausted_split_is_an_error() {
        let spec = SeasonalSpec::new(1, 2, 1, vec![1], 0).unwrap();
        let ts = ramp_series(13, 0);
        assert!(split_train_validation_test(&ts, &spec, 10, 1).is_err());
    }

    #[test]
    fn stepping_anchors_by_horizon_tiles_targets() {
        // Windows anchored K+1 apart cover disjoint, adjacent target ranges.
        let spec = SeasonalSpec::new(2, 6, 1, vec![2], 2).unwrap();
        let ts = ramp_series(40, 0);
        let a = assemble_window(&ts, &spec, 10).unwrap();
        let b = assemble_window(&ts, &spec, 10 + spec.k + 1).unwrap();
        assert_eq!(a.targets.last().unwrap() + 1.0, b.targets[0]);
    }
}
