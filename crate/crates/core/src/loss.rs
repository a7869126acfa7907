//! Mean squared error over a prediction window.

use crate::error::{Error, Result};

/// Returns `(loss, d_loss/d_preds)` where loss is the mean of squared
/// differences.
pub fn mse_loss(preds: &[f64], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
    if preds.len() != targets.len() {
        return Err(Error::DimMismatch(format!(
            "mse: {} predictions vs {} targets",
            preds.len(),
            targets.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::Config("mse over empty window".into()));
    }
    let n = preds.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; preds.len()];
    for i in 0..preds.len() {
        let diff = preds[i] - targets[i];
        loss += diff * diff;
        grad[i] = 2.0 * diff / n;
    }
    Ok((loss / n, grad))
}
