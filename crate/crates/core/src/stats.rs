//! Sample autocorrelation and partial autocorrelation diagnostics.

use crate::error::{Error, Result};

/// Sample autocorrelations at lags `0..=max_lag`; `acf[0] == 1`.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 2 || max_lag >= n {
        return Err(Error::Config(format!(
            "acf: need max_lag < len ({max_lag} vs {n}) and len >= 2"
        )));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var: f64 = series.iter().map(|v| (v - mean).powi(2)).sum();
    if var == 0.0 {
        return Err(Error::DegenerateSample("acf of a constant series".into()));
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let cov: f64 = (lag..n)
            .map(|t| (series[t] - mean) * (series[t - lag] - mean))
            .sum();
        out.push(cov / var);
    }
    Ok(out)
}

/// Partial autocorrelations at lags `0..=max_lag` via the Durbin-Levinson
/// recursion on the sample ACF; `pacf[0] == 1` by convention.
pub fn pacf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let rho = acf(series, max_lag)?;
    let mut out = vec![1.0];
    if max_lag == 0 {
        return Ok(out);
    }
    // phi[k] holds the AR(j) coefficients phi_{j,1..j} of the current order.
    let mut phi = vec![0.0; max_lag + 1];
    let mut prev = vec![0.0; max_lag + 1];
    phi[1] = rho[1];
    out.push(rho[1]);
    let mut err = 1.0 - rho[1] * rho[1];
    for j in 2..=max_lag {
        prev[..j].copy_from_slice(&phi[..j]);
        let mut acc = rho[j];
        for i in 1..j {
            acc -= prev[i] * rho[j - i];
        }
        if err.abs() < 1e-14 {
            // Perfectly predictable at a lower order; remaining PACF is 0.
            out.push(0.0);
            phi[j] = 0.0;
            continue;
        }
        let reflection = acc / err;
        phi[j] = reflection;
        for i in 1..j {
            phi[i] = prev[i] - reflection * prev[j - i];
        }
        err *= 1.0 - reflection * reflection;
        out.push(reflection);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sarx::gaussian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn acf_at_lag_zero_is_one() {
        let series: Vec<f64> = (0..100).map(|t| (t as f64 * 0.3).sin()).collect();
        let r = acf(&series, 10).unwrap();
        assert_eq!(r[0], 1.0);
    }

    #[test]
    fn white_noise_pacf_inside_confidence_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let n = 10_000;
        let series: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
        let p = pacf(&series, 30).unwrap();
        let band = 2.0 / (n as f64).sqrt();
        let inside = p[1..].iter().filter(|v| v.abs() < band).count();
        // ~95% expected inside the band; demand a loose 85%.
        assert!(inside >= 26, "only {inside}/30 inside the band");
    }

    #[test]
    fn ar1_pacf_matches_theory() {
        // AR(1) with phi = 0.5: pacf(1) ~ 0.5, pacf(2) ~ 0.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut y = vec![0.0];
        for _ in 1..20_000 {
            let prev = *y.last().unwrap();
            y.push(0.5 * prev + gaussian(&mut rng));
        }
        let p = pacf(&y[100..], 5).unwrap();
        assert!((p[1] - 0.5).abs() < 0.05, "pacf(1) = {}", p[1]);
        assert!(p[2].abs() < 0.05, "pacf(2) = {}", p[2]);
    }

    #[test]
    fn constant_series_rejected() {
        assert!(acf(&[3.0; 50], 5).is_err());
    }
}
