//! Least squares via Householder QR (no normal equations).

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Solution of `min ||X b - y||` with per-coefficient standard errors.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub coeffs: Vec<f64>,
    pub residual_sum_squares: f64,
    /// Residual variance estimate `RSS / (n - k)`; zero when `n == k`.
    pub sigma2: f64,
    pub std_errors: Vec<f64>,
}

/// Solves the overdetermined system; `labels` name the columns for
/// rank-deficiency reporting.
pub fn solve_least_squares(
    design: &Matrix,
    targets: &[f64],
    labels: &[String],
) -> Result<LeastSquares> {
    let n = design.rows();
    let k = design.cols();
    if targets.len() != n {
        return Err(Error::DimMismatch(format!(
            "least squares: {} rows vs {} targets",
            n,
            targets.len()
        )));
    }
    if labels.len() != k {
        return Err(Error::DimMismatch("least squares: label count".into()));
    }
    if n < k {
        return Err(Error::Config(format!(
            "least squares: {n} rows for {k} coefficients"
        )));
    }

    // Working copies; `a` becomes R in place, `y` becomes Q^T y.
    let mut a: Vec<f64> = design.data().to_vec();
    let mut y = targets.to_vec();

    let max_col_norm = (0..k)
        .map(|j| (0..n).map(|i| a[i * k + j].powi(2)).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    let tol = 1e-10 * max_col_norm.max(1e-300);

    // Householder vectors stored below the diagonal are not needed again, so
    // each reflection is applied eagerly to the remaining columns and `y`.
    for j in 0..k {
        let mut norm = 0.0;
        for i in j..n {
            norm += a[i * k + j] * a[i * k + j];
        }
        let norm = norm.sqrt();
        if norm <= tol {
            return Err(Error::RankDeficient {
                column: labels[j].clone(),
            });
        }
        let alpha = if a[j * k + j] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..n).map(|i| a[i * k + j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for c in j..k {
                let mut dot = 0.0;
                for (o, vi) in v.iter().enumerate() {
                    dot += vi * a[(j + o) * k + c];
                }
                let f = 2.0 * dot / vnorm2;
                for (o, vi) in v.iter().enumerate() {
                    a[(j + o) * k + c] -= f * vi;
                }
            }
            let mut dot = 0.0;
            for (o, vi) in v.iter().enumerate() {
                dot += vi * y[j + o];
            }
            let f = 2.0 * dot / vnorm2;
            for (o, vi) in v.iter().enumerate() {
                y[j + o] -= f * vi;
            }
        }
        a[j * k + j] = alpha;
        if a[j * k + j].abs() <= tol {
            return Err(Error::RankDeficient {
                column: labels[j].clone(),
            });
        }
    }

    // Back-substitute R b = (Q^T y)[..k].
    let mut coeffs = vec![0.0; k];
    for j in (0..k).rev() {
        let mut acc = y[j];
        for c in j + 1..k {
            acc -= a[j * k + c] * coeffs[c];
        }
        coeffs[j] = acc / a[j * k + j];
    }

    let residual_sum_squares: f64 = y[k..].iter().map(|v| v * v).sum();
    let dof = n.saturating_sub(k);
    let sigma2 = if dof > 0 {
        residual_sum_squares / dof as f64
    } else {
        0.0
    };

    // (X^T X)^-1 = R^-1 R^-T; diag entries come from the rows of R^-1.
    let mut rinv = vec![0.0; k * k];
    for j in 0..k {
        rinv[j * k + j] = 1.0 / a[j * k + j];
        for c in j + 1..k {
            let mut acc = 0.0;
            for m in j..c {
                acc += rinv[j * k + m] * a[m * k + c];
            }
            rinv[j * k + c] = -acc / a[c * k + c];
        }
    }
    let std_errors: Vec<f64> = (0..k)
        .map(|j| {
            let diag: f64 = (j..k).map(|c| rinv[j * k + c].powi(2)).sum();
            (sigma2 * diag).sqrt()
        })
        .collect();

    Ok(LeastSquares {
        coeffs,
        residual_sum_squares,
        sigma2,
        std_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn exact_system_recovered() {
        // y = 2*a - 3*b + 1
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let a = (i as f64 * 0.37).sin();
                let b = (i as f64 * 0.91).cos();
                vec![1.0, a, b]
            })
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| 1.0 + 2.0 * r[1] - 3.0 * r[2]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let sol = solve_least_squares(&x, &y, &labels(3)).unwrap();
        assert!((sol.coeffs[0] - 1.0).abs() < 1e-12);
        assert!((sol.coeffs[1] - 2.0).abs() < 1e-12);
        assert!((sol.coeffs[2] + 3.0).abs() < 1e-12);
        assert!(sol.residual_sum_squares < 1e-20);
    }

    #[test]
    fn residuals_orthogonal_to_columns() {
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                let t = i as f64;
                vec![1.0, (t * 0.11).sin(), (t * 0.07).cos(), (t * 0.29).sin()]
            })
            .collect();
        let y: Vec<f64> = (0..50).map(|i| ((i * i) as f64 * 0.013).sin()).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let sol = solve_least_squares(&x, &y, &labels(4)).unwrap();
        let fitted: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().zip(&sol.coeffs).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        for c in 0..4 {
            let dot: f64 = rows
                .iter()
                .zip(y.iter().zip(&fitted))
                .map(|(r, (yv, fv))| r[c] * (yv - fv))
                .sum();
            assert!(dot.abs() < 1e-8, "column {c} not orthogonal: {dot}");
        }
    }

    #[test]
    fn collinear_column_named() {
        // Third column duplicates the first.
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![1.0, i as f64, 1.0])
            .collect();
        let y = vec![0.0; 10];
        let x = Matrix::from_rows(&rows).unwrap();
        match solve_least_squares(&x, &y, &labels(3)) {
            Err(Error::RankDeficient { column }) => assert_eq!(column, "c2"),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }
}
