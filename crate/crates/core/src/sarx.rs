//! Linear seasonal auto-regression with exogenous inputs.
//!
//! The model regresses `y(t)` on three groups of lags — the `p` standard
//! lags, the seasonal anchors `iS`, and the `Q_i` lags behind each anchor —
//! plus, when exogenous data is present, `x` at the current instant and at
//! every regressed lag slot. Fitting is ordinary least squares; multi-step
//! prediction recurses single-step forecasts, substituting predictions for
//! observations that are not yet available.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lstsq::{solve_least_squares, LeastSquares};
use crate::series::{SeasonalSpec, TimeSeries};

/// Guard against explosive synthetic recursions.
pub const STABILITY_LIMIT: f64 = 1e9;

/// Coefficients of the (expanded) linear SARX regression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SarxCoeffs {
    /// `a_1 .. a_p` on the standard lags.
    pub standard: Vec<f64>,
    /// `seasonal[i][j]` multiplies `y(t - (i+1)S - j)`; row `i` has `Q_{i+1} + 1`
    /// entries, the first sitting on the seasonal anchor itself.
    pub seasonal: Vec<Vec<f64>>,
    /// Exogenous coefficients, one `m`-dim row per slot: index 0 is the
    /// current instant, the rest follow [`lag_slots`] order.
    pub exo: Vec<Vec<f64>>,
    pub intercept: f64,
}

impl SarxCoeffs {
    /// All-zero coefficients shaped by `spec` for `exo_dim` channels.
    pub fn zeros(spec: &SeasonalSpec, exo_dim: usize) -> Self {
        let n_slots = lag_slots(spec).len();
        SarxCoeffs {
            standard: vec![0.0; spec.p],
            seasonal: spec.group_sizes.iter().map(|&q| vec![0.0; q + 1]).collect(),
            exo: vec![vec![0.0; exo_dim]; n_slots + 1],
            intercept: 0.0,
        }
    }

    pub fn exo_dim(&self) -> usize {
        self.exo.first().map_or(0, Vec::len)
    }

    fn check_shape(&self, spec: &SeasonalSpec) -> Result<()> {
        if self.standard.len() != spec.p
            || self.seasonal.len() != spec.seasonal_order
            || self
                .seasonal
                .iter()
                .zip(&spec.group_sizes)
                .any(|(row, &q)| row.len() != q + 1)
            || self.exo.len() != lag_slots(spec).len() + 1
        {
            return Err(Error::DimMismatch(
                "SARX coefficients do not match the seasonal spec".into(),
            ));
        }
        Ok(())
    }

    /// Evaluates the regression. `y_lag(l)` must return `y(t-l)` for `l >= 1`
    /// and `x_lag(l)` the exogenous vector at `t-l` for `l >= 0`.
    pub fn regress(
        &self,
        spec: &SeasonalSpec,
        mut y_lag: impl FnMut(usize) -> f64,
        mut x_lag: impl FnMut(usize) -> Vec<f64>,
    ) -> f64 {
        let mut acc = self.intercept;
        for (i, a) in self.standard.iter().enumerate() {
            acc += a * y_lag(i + 1);
        }
        for (i, row) in self.seasonal.iter().enumerate() {
            let anchor = (i + 1) * spec.period;
            for (j, b) in row.iter().enumerate() {
                acc += b * y_lag(anchor + j);
            }
        }
        if self.exo_dim() > 0 {
            let x0 = x_lag(0);
            acc += dot_small(&self.exo[0], &x0);
            for (slot, lag) in lag_slots(spec).iter().enumerate() {
                let xv = x_lag(*lag);
                acc += dot_small(&self.exo[slot + 1], &xv);
            }
        }
        acc
    }

    /// Design-matrix-ordered flat view: intercept, y slots, x slots.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = vec![self.intercept];
        out.extend_from_slice(&self.standard);
        for row in &self.seasonal {
            out.extend_from_slice(row);
        }
        for row in &self.exo {
            out.extend_from_slice(row);
        }
        out
    }
}

fn dot_small(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Every regressed lag in canonical order: `1..p`, then per cycle `i` the
/// anchor `iS` followed by `iS+1 .. iS+Q_i`.
pub fn lag_slots(spec: &SeasonalSpec) -> Vec<usize> {
    let mut slots: Vec<usize> = (1..=spec.p).collect();
    for (i, &q) in spec.group_sizes.iter().enumerate() {
        let anchor = (i + 1) * spec.period;
        for j in 0..=q {
            slots.push(anchor + j);
        }
    }
    slots
}

/// Expands a multiplicative seasonal AR — lag polynomial
/// `(1 - psi_1 L - .. - psi_p L^p)(1 - PSI_1 L^S - .. - PSI_P L^PS)` — into
/// explicit [`SarxCoeffs`]: `a_i = psi_i`, `b_0^k = PSI_k`,
/// `b_i^k = -psi_i PSI_k`. The multiplicative form forces every group size
/// to equal `p`.
pub fn expand_multiplicative(
    psi: &[f64],
    seasonal_psi: &[f64],
    spec: &SeasonalSpec,
) -> Result<SarxCoeffs> {
    if psi.len() != spec.p {
        return Err(Error::DimMismatch(format!(
            "{} standard coefficients for p = {}",
            psi.len(),
            spec.p
        )));
    }
    if seasonal_psi.len() != spec.seasonal_order {
        return Err(Error::DimMismatch(format!(
            "{} seasonal coefficients for P = {}",
            seasonal_psi.len(),
            spec.seasonal_order
        )));
    }
    if spec.group_sizes.iter().any(|&q| q != spec.p) {
        return Err(Error::DimMismatch(format!(
            "multiplicative expansion needs every Q_i == p = {}, got {:?}",
            spec.p, spec.group_sizes
        )));
    }
    let mut coeffs = SarxCoeffs::zeros(spec, 0);
    coeffs.standard = psi.to_vec();
    for (k, &cap) in seasonal_psi.iter().enumerate() {
        coeffs.seasonal[k][0] = cap;
        for (i, &s) in psi.iter().enumerate() {
            coeffs.seasonal[k][i + 1] = -s * cap;
        }
    }
    Ok(coeffs)
}

/// A fitted SARX model with inference diagnostics.
#[derive(Clone, Debug)]
pub struct SarxFit {
    pub coeffs: SarxCoeffs,
    /// Residual variance estimate.
    pub sigma2: f64,
    /// Standard errors aligned with [`SarxCoeffs::flat`].
    pub std_errors: Vec<f64>,
}

/// Fits the regression by least squares over the given anchors.
pub fn fit_sarx(ts: &TimeSeries, spec: &SeasonalSpec, anchors: &[usize]) -> Result<SarxFit> {
    spec.validate()?;
    let slots = lag_slots(spec);
    let deepest = *slots.iter().max().expect("p >= 1");
    let m = ts.exo_dim();
    let n_coeffs = 1 + slots.len() + m * (slots.len() + 1);
    if anchors.len() < n_coeffs {
        return Err(Error::Config(format!(
            "fit_sarx: {} anchors for {} coefficients",
            anchors.len(),
            n_coeffs
        )));
    }

    let mut labels = vec!["intercept".to_string()];
    for lag in &slots {
        labels.push(format!("y_lag{lag}"));
    }
    for c in 0..m {
        labels.push(format!("x{}_lag0", c + 1));
    }
    for lag in &slots {
        for c in 0..m {
            labels.push(format!("x{}_lag{lag}", c + 1));
        }
    }

    let mut rows = Vec::with_capacity(anchors.len());
    let mut targets = Vec::with_capacity(anchors.len());
    for &t in anchors {
        if t < deepest || t >= ts.len() {
            return Err(Error::WindowOutOfRange {
                anchor: t,
                bound: format!("fit needs {deepest} <= t <= {}", ts.len() - 1),
            });
        }
        let mut row = Vec::with_capacity(n_coeffs);
        row.push(1.0);
        for lag in &slots {
            row.push(ts.y[t - lag]);
        }
        row.extend_from_slice(&ts.x[t]);
        for lag in &slots {
            row.extend_from_slice(&ts.x[t - lag]);
        }
        rows.push(row);
        targets.push(ts.y[t]);
    }
    let design = Matrix::from_rows(&rows)?;
    let LeastSquares {
        coeffs: flat,
        sigma2,
        std_errors,
        ..
    } = solve_least_squares(&design, &targets, &labels)?;

    let mut coeffs = SarxCoeffs::zeros(spec, m);
    let mut it = flat.iter();
    coeffs.intercept = *it.next().expect("intercept");
    for a in &mut coeffs.standard {
        *a = *it.next().expect("standard");
    }
    for row in &mut coeffs.seasonal {
        for b in row.iter_mut() {
            *b = *it.next().expect("seasonal");
        }
    }
    for row in &mut coeffs.exo {
        for c in row.iter_mut() {
            *c = *it.next().expect("exo");
        }
    }

    Ok(SarxFit {
        coeffs,
        sigma2,
        std_errors,
    })
}

/// Multi-step forecast by recursing the one-step formula `K+1` times from
/// anchor `t`, substituting earlier predictions for unavailable `y` values.
/// Exogenous inputs over the horizon must be observed.
pub fn predict_sarx_recursive(
    coeffs: &SarxCoeffs,
    spec: &SeasonalSpec,
    ts: &TimeSeries,
    t: usize,
    k: usize,
) -> Result<Vec<f64>> {
    coeffs.check_shape(spec)?;
    let deepest = *lag_slots(spec).iter().max().expect("p >= 1");
    if t < deepest {
        return Err(Error::WindowOutOfRange {
            anchor: t,
            bound: format!("recursive prediction needs t >= {deepest}"),
        });
    }
    if coeffs.exo_dim() > 0 && t + k > ts.len() - 1 {
        return Err(Error::ExogenousHorizonUnavailable {
            needed: t + k,
            last: ts.len() - 1,
        });
    }
    if coeffs.exo_dim() != ts.exo_dim() {
        return Err(Error::DimMismatch(format!(
            "coefficients expect {} exogenous channels, series has {}",
            coeffs.exo_dim(),
            ts.exo_dim()
        )));
    }

    let mut preds = Vec::with_capacity(k + 1);
    for step in 0..=k {
        let now = t + step;
        let value = coeffs.regress(
            spec,
            |lag| {
                let tau = now - lag;
                if tau >= t {
                    preds[tau - t]
                } else {
                    ts.y[tau]
                }
            },
            |lag| ts.x[now - lag].clone(),
        );
        preds.push(value);
    }
    Ok(preds)
}

/// The naive baseline: every horizon step repeats the last observed value.
pub fn copy_previous(ts: &TimeSeries, t: usize, k: usize) -> Result<Vec<f64>> {
    if t == 0 {
        return Err(Error::WindowOutOfRange {
            anchor: 0,
            bound: "copy-previous needs one observed value before the anchor".into(),
        });
    }
    if t > ts.len() {
        return Err(Error::WindowOutOfRange {
            anchor: t,
            bound: format!("series ends at {}", ts.len() - 1),
        });
    }
    Ok(vec![ts.y[t - 1]; k + 1])
}

/// White-noise level for synthetic generation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma_e: f64,
}

/// Exogenous driving process for synthetic corpora.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExoProcess {
    None,
    /// First-order auto-regression `x(t) = phi x(t-1) + N(0, sigma)`.
    Ar1 { phi: f64, sigma: f64 },
    /// Sinusoid with additive noise.
    Sine {
        period: usize,
        amplitude: f64,
        noise: f64,
    },
}

impl ExoProcess {
    pub fn dim(&self) -> usize {
        match self {
            ExoProcess::None => 0,
            _ => 1,
        }
    }

    fn generate(&self, len: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        match self {
            ExoProcess::None => vec![Vec::new(); len],
            ExoProcess::Ar1 { phi, sigma } => {
                let mut x = 0.0;
                (0..len)
                    .map(|_| {
                        x = phi * x + sigma * gaussian(rng);
                        vec![x]
                    })
                    .collect()
            }
            ExoProcess::Sine {
                period,
                amplitude,
                noise,
            } => (0..len)
                .map(|t| {
                    let phase = t as f64 / *period as f64 * std::f64::consts::TAU;
                    vec![amplitude * phase.sin() + noise * gaussian(rng)]
                })
                .collect(),
        }
    }
}

/// Standard normal via Box-Muller; two uniforms per draw keeps the stream
/// reproducible without caching state.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Simulates the regression forward from zero initial conditions, discarding
/// a burn-in of `10 * S` samples.
pub fn synthesize_sarx(
    coeffs: &SarxCoeffs,
    spec: &SeasonalSpec,
    noise: NoiseSpec,
    length: usize,
    exo: &ExoProcess,
    seed: u64,
) -> Result<TimeSeries> {
    coeffs.check_shape(spec)?;
    if coeffs.exo_dim() != exo.dim() {
        return Err(Error::DimMismatch(format!(
            "coefficients expect {} exogenous channels, generator provides {}",
            coeffs.exo_dim(),
            exo.dim()
        )));
    }
    if noise.sigma_e < 0.0 {
        return Err(Error::Config("sigma_e must be >= 0".into()));
    }
    if length == 0 {
        return Err(Error::Config("synthesis length must be >= 1".into()));
    }
    let burn_in = 10 * spec.period;
    let total = length + burn_in;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = exo.generate(total, &mut rng);
    let mut y = Vec::with_capacity(total);
    for t in 0..total {
        let value = coeffs.regress(
            spec,
            |lag| {
                if lag > t {
                    0.0
                } else {
                    y[t - lag]
                }
            },
            |lag| {
                if lag > t {
                    vec![0.0; exo.dim()]
                } else {
                    x[t - lag].clone()
                }
            },
        ) + noise.sigma_e * gaussian(&mut rng);
        if value.abs() > STABILITY_LIMIT {
            return Err(Error::UnstableSimulation {
                t,
                limit: STABILITY_LIMIT,
            });
        }
        y.push(value);
    }
    TimeSeries::new(
        format!("synth-{seed}"),
        y.split_off(burn_in),
        x[burn_in..].to_vec(),
    )
}
