//! Evaluation metrics: MAPE, MASE, total variation, Welch's t-test, and
//! cross-method summaries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One evaluated prediction window in the original (unscaled) domain.
#[derive(Clone, Debug)]
pub struct EvalWindow {
    pub preds: Vec<f64>,
    pub actuals: Vec<f64>,
    /// The sequence's training segment, used to normalize MASE.
    pub train_reference: Vec<f64>,
}

impl EvalWindow {
    pub fn new(preds: Vec<f64>, actuals: Vec<f64>, train_reference: Vec<f64>) -> Result<Self> {
        if preds.len() != actuals.len() || preds.is_empty() {
            return Err(Error::DimMismatch(format!(
                "eval window: {} predictions vs {} actuals",
                preds.len(),
                actuals.len()
            )));
        }
        if actuals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("eval window: non-finite actuals".into()));
        }
        Ok(EvalWindow {
            preds,
            actuals,
            train_reference,
        })
    }

    pub fn mape(&self) -> Result<f64> {
        mape(&self.preds, &self.actuals)
    }

    pub fn mase(&self, lag: usize) -> Result<f64> {
        mase(&self.preds, &self.actuals, &self.train_reference, lag)
    }
}

/// Mean absolute percentage error over the window, in percent.
///
/// A zero actual makes the metric undefined and is reported as an error
/// carrying the offending step, never skipped silently.
pub fn mape(preds: &[f64], actuals: &[f64]) -> Result<f64> {
    if preds.len() != actuals.len() || preds.is_empty() {
        return Err(Error::DimMismatch("mape: window lengths".into()));
    }
    let mut acc = 0.0;
    for (i, (p, a)) in preds.iter().zip(actuals).enumerate() {
        if *a == 0.0 {
            return Err(Error::UndefinedMape { index: i });
        }
        acc += (p - a).abs() * 100.0 / a.abs();
    }
    Ok(acc / preds.len() as f64)
}

/// Mean absolute scaled error: each step's absolute error divided by the
/// average lag-`lag` absolute difference of the training segment, averaged
/// over the window. The same denominator serves every step.
pub fn mase(preds: &[f64], actuals: &[f64], train_reference: &[f64], lag: usize) -> Result<f64> {
    if preds.len() != actuals.len() || preds.is_empty() {
        return Err(Error::DimMismatch("mase: window lengths".into()));
    }
    let denom = naive_error(train_reference, lag)?;
    let acc: f64 = preds
        .iter()
        .zip(actuals)
        .map(|(p, a)| (p - a).abs() / denom)
        .sum();
    Ok(acc / preds.len() as f64)
}

/// Variant that scales the error at horizon step `i` (0-based) by the
/// training-segment error at lag `i + 1` instead of one shared lag.
pub fn mase_per_step_lag(preds: &[f64], actuals: &[f64], train_reference: &[f64]) -> Result<f64> {
    if preds.len() != actuals.len() || preds.is_empty() {
        return Err(Error::DimMismatch("mase: window lengths".into()));
    }
    let mut acc = 0.0;
    for (i, (p, a)) in preds.iter().zip(actuals).enumerate() {
        acc += (p - a).abs() / naive_error(train_reference, i + 1)?;
    }
    Ok(acc / preds.len() as f64)
}

/// Average absolute lag-`lag` difference over the training segment — the
/// copy-previous error the scaled metrics normalize by.
pub fn naive_error(train_reference: &[f64], lag: usize) -> Result<f64> {
    if lag == 0 || train_reference.len() <= lag {
        return Err(Error::Config(format!(
            "mase: training reference of {} points cannot support lag {lag}",
            train_reference.len()
        )));
    }
    let n = train_reference.len();
    let sum: f64 = (lag..n)
        .map(|j| (train_reference[j] - train_reference[j - lag]).abs())
        .sum();
    let denom = sum / (n - lag) as f64;
    if denom == 0.0 {
        return Err(Error::ZeroMaseDenominator { lag });
    }
    Ok(denom)
}

/// Sum of absolute first differences.
pub fn total_variation(series: &[f64]) -> f64 {
    series.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Welch's unequal-variance t-test result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    pub t: f64,
    pub dof: f64,
    pub p_two_sided: f64,
}

/// Welch's t statistic with Welch-Satterthwaite degrees of freedom and a
/// two-sided p-value from the t distribution.
pub fn welch_t(sample_a: &[f64], sample_b: &[f64]) -> Result<WelchTest> {
    let (na, nb) = (sample_a.len(), sample_b.len());
    if na < 2 || nb < 2 {
        return Err(Error::DegenerateSample(format!(
            "welch: need >= 2 points per sample, got {na} and {nb}"
        )));
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let var = |s: &[f64], m: f64| s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (s.len() - 1) as f64;
    let (ma, mb) = (mean(sample_a), mean(sample_b));
    let (va, vb) = (var(sample_a, ma), var(sample_b, mb));
    if va <= 0.0 || vb <= 0.0 {
        return Err(Error::DegenerateSample(
            "welch: zero variance sample".into(),
        ));
    }
    let (fa, fb) = (va / na as f64, vb / nb as f64);
    let se = (fa + fb).sqrt();
    let t = (ma - mb) / se;
    let dof = (fa + fb).powi(2) / (fa * fa / (na as f64 - 1.0) + fb * fb / (nb as f64 - 1.0));
    let p_two_sided = if t == 0.0 {
        1.0
    } else {
        student_t_two_sided_p(t, dof)
    };
    Ok(WelchTest {
        t,
        dof,
        p_two_sided,
    })
}

/// Two-sided tail probability of Student's t: `I_{v/(v+t^2)}(v/2, 1/2)`.
pub fn student_t_two_sided_p(t: f64, dof: f64) -> f64 {
    let x = dof / (dof + t * t);
    regularized_incomplete_beta(dof / 2.0, 0.5, x)
}

/// Regularized incomplete beta `I_x(a, b)` by Lentz's continued fraction.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0 && (0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let front = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln())
        .exp();
    // The continued fraction converges fast for x <= (a+1)/(a+b+2); the
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) covers the rest (and lands
    // strictly inside the fast region, so the recursion terminates).
    if x <= (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - regularized_incomplete_beta(b, a, 1.0 - x)
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 400;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Lanczos approximation of `ln Gamma`, accurate to ~1e-13.
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Max / average / min of one metric across sequences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub max: f64,
    pub avg: f64,
    pub min: f64,
}

impl MetricSummary {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        let mut sum = 0.0;
        let mut n = 0usize;
        for v in values {
            max = max.max(v);
            min = min.min(v);
            sum += v;
            n += 1;
        }
        if n == 0 {
            return Err(Error::DegenerateSample("summary of no values".into()));
        }
        Ok(MetricSummary {
            max,
            avg: sum / n as f64,
            min,
        })
    }
}

/// Candidate-vs-baseline breakdown over per-sequence metric values.
///
/// Sequences tie-break in the baseline's favor: "candidate better" means
/// strictly lower. The two partitions are exhaustive and disjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Fraction of sequences (in percent) where the candidate is strictly
    /// better.
    pub candidate_better_pct: f64,
    /// (candidate mean, baseline mean) over sequences the candidate wins.
    pub avg_when_candidate_better: Option<(f64, f64)>,
    /// (candidate mean, baseline mean) over the remaining sequences.
    pub avg_when_baseline_better: Option<(f64, f64)>,
}

/// Compares per-sequence metric values keyed by sequence id. Both maps must
/// cover the same sequences.
pub fn compare_methods(
    candidate: &BTreeMap<String, f64>,
    baseline: &BTreeMap<String, f64>,
) -> Result<Comparison> {
    if candidate.len() != baseline.len()
        || candidate.keys().any(|k| !baseline.contains_key(k))
    {
        return Err(Error::DimMismatch(
            "comparison: methods cover different sequences".into(),
        ));
    }
    if candidate.is_empty() {
        return Err(Error::DegenerateSample("comparison of no sequences".into()));
    }
    let mut won: Vec<(f64, f64)> = Vec::new();
    let mut lost: Vec<(f64, f64)> = Vec::new();
    for (id, &c) in candidate {
        let b = baseline[id];
        if c < b {
            won.push((c, b));
        } else {
            lost.push((c, b));
        }
    }
    let pair_means = |pairs: &[(f64, f64)]| -> Option<(f64, f64)> {
        if pairs.is_empty() {
            return None;
        }
        let n = pairs.len() as f64;
        Some((
            pairs.iter().map(|p| p.0).sum::<f64>() / n,
            pairs.iter().map(|p| p.1).sum::<f64>() / n,
        ))
    };
    Ok(Comparison {
        candidate_better_pct: won.len() as f64 / candidate.len() as f64 * 100.0,
        avg_when_candidate_better: pair_means(&won),
        avg_when_baseline_better: pair_means(&lost),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mape_hand_cases() {
        assert_eq!(mape(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mape(&[110.0, 90.0], &[100.0, 100.0]).unwrap(), 10.0);
        assert!(matches!(
            mape(&[1.0, 1.0], &[1.0, 0.0]),
            Err(Error::UndefinedMape { index: 1 })
        ));
    }

    #[test]
    fn mase_hand_case() {
        // train [1..5], lag 1 -> denominator 1.0; |6 - 5.5| = 0.5.
        let m = mase(&[6.0], &[5.5], &[1.0, 2.0, 3.0, 4.0, 5.0], 1).unwrap();
        assert_eq!(m, 0.5);
        assert_eq!(
            mase(&[5.5], &[5.5], &[1.0, 2.0, 3.0, 4.0, 5.0], 1).unwrap(),
            0.0
        );
    }

    #[test]
    fn mase_degenerate_reference_rejected() {
        assert!(matches!(
            mase(&[1.0], &[2.0], &[3.0, 3.0, 3.0], 1),
            Err(Error::ZeroMaseDenominator { lag: 1 })
        ));
        assert!(mase(&[1.0], &[2.0], &[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn mase_affine_invariance() {
        let preds = [2.0, 3.5, 1.0];
        let actuals = [2.5, 3.0, 1.5];
        let train = [0.5, 1.5, 0.25, 2.0, 1.0, 0.75];
        let base = mase(&preds, &actuals, &train, 2).unwrap();
        let alpha = 37.5;
        let scale = |s: &[f64]| -> Vec<f64> { s.iter().map(|v| v * alpha).collect() };
        let scaled = mase(&scale(&preds), &scale(&actuals), &scale(&train), 2).unwrap();
        assert!((base - scaled).abs() < 1e-12);
    }

    #[test]
    fn per_step_lag_variant_differs_in_general() {
        let train = [0.0, 1.0, 3.0, 0.0, 1.0, 3.0, 0.0, 1.0, 3.0];
        let fixed = mase(&[0.5, 0.5], &[0.0, 1.0], &train, 2).unwrap();
        let stepped = mase_per_step_lag(&[0.5, 0.5], &[0.0, 1.0], &train).unwrap();
        assert!((fixed - stepped).abs() > 1e-6);
    }

    #[test]
    fn total_variation_cases() {
        assert_eq!(total_variation(&[5.0, 5.0, 5.0]), 0.0);
        assert_eq!(total_variation(&[1.0, 3.0, 2.0]), 3.0);
        // Monotone series: last - first.
        assert_eq!(total_variation(&[1.0, 2.0, 4.0, 7.0]), 6.0);
        assert_eq!(total_variation(&[2.0]), 0.0);
    }

    #[test]
    fn welch_textbook_case() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [3.0, 4.0, 5.0, 6.0, 7.0];
        let w = welch_t(&a, &b).unwrap();
        assert!((w.t + 2.0).abs() < 1e-12, "t = {}", w.t);
        assert!((w.dof - 8.0).abs() < 1e-12, "dof = {}", w.dof);
        assert!((w.p_two_sided - 0.0805).abs() < 1e-3, "p = {}", w.p_two_sided);
    }

    #[test]
    fn welch_identical_samples() {
        let a = [1.0, 2.0, 3.0];
        let w = welch_t(&a, &a).unwrap();
        assert_eq!(w.t, 0.0);
        assert_eq!(w.p_two_sided, 1.0);
    }

    #[test]
    fn welch_separated_samples() {
        let a: Vec<f64> = (0..10).map(|i| (i as f64) * 0.2 - 0.9).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 100.0).collect();
        let w = welch_t(&a, &b).unwrap();
        assert!(w.p_two_sided < 1e-6);
    }

    #[test]
    fn welch_degenerate_samples_rejected() {
        assert!(welch_t(&[1.0], &[1.0, 2.0]).is_err());
        assert!(welch_t(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn incomplete_beta_reference_values() {
        // I_0.5(a, a) = 0.5 by symmetry.
        for a in [0.5, 1.0, 4.0, 10.0] {
            assert!((regularized_incomplete_beta(a, a, 0.5) - 0.5).abs() < 1e-12);
        }
        // I_x(1, 1) = x.
        assert!((regularized_incomplete_beta(1.0, 1.0, 0.25) - 0.25).abs() < 1e-12);
        // I_x(1, b) = 1 - (1-x)^b -> for b=2, x=0.3: 1 - 0.49 = 0.51.
        assert!((regularized_incomplete_beta(1.0, 2.0, 0.3) - 0.51).abs() < 1e-12);
    }

    #[test]
    fn summary_and_comparison() {
        let s = MetricSummary::from_values([0.5, 1.5, 1.0]).unwrap();
        assert_eq!(s.max, 1.5);
        assert_eq!(s.min, 0.5);
        assert!((s.avg - 1.0).abs() < 1e-12);

        let cand: BTreeMap<String, f64> =
            [("a", 0.4), ("b", 0.9), ("c", 1.2)].map(|(k, v)| (k.to_string(), v)).into();
        let base: BTreeMap<String, f64> =
            [("a", 0.6), ("b", 0.9), ("c", 1.0)].map(|(k, v)| (k.to_string(), v)).into();
        let cmp = compare_methods(&cand, &base).unwrap();
        // "a" won; "b" ties to the baseline; "c" lost.
        assert!((cmp.candidate_better_pct - 100.0 / 3.0).abs() < 1e-12);
        let (cw, bw) = cmp.avg_when_candidate_better.unwrap();
        assert_eq!((cw, bw), (0.4, 0.6));
        let (cl, bl) = cmp.avg_when_baseline_better.unwrap();
        assert!((cl - 1.05).abs() < 1e-12);
        assert!((bl - 0.95).abs() < 1e-12);

        // Symmetric swap flips the partition sizes.
        let swapped = compare_methods(&base, &cand).unwrap();
        assert!((swapped.candidate_better_pct - 100.0 / 3.0).abs() < 1e-12);

        // Single sequence, candidate better -> 100%.
        let one_c: BTreeMap<String, f64> = [("s", 0.1)].map(|(k, v)| (k.to_string(), v)).into();
        let one_b: BTreeMap<String, f64> = [("s", 0.2)].map(|(k, v)| (k.to_string(), v)).into();
        assert_eq!(
            compare_methods(&one_c, &one_b).unwrap().candidate_better_pct,
            100.0
        );
    }
}
