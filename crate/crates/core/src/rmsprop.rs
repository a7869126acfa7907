//! RMSProp over flat parameter vectors.
//!
//! ```text
//! acc   <- rho * acc + (1 - rho) * g^2
//! theta <- theta - lr * g / sqrt(acc + eps)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RmsProp {
    pub learning_rate: f64,
    pub rho: f64,
    pub epsilon: f64,
    acc: Vec<f64>,
}

impl RmsProp {
    /// Standard constants: rho = 0.9, epsilon = 1e-8.
    pub fn new(learning_rate: f64, param_count: usize) -> Result<Self> {
        Self::with_config(learning_rate, 0.9, 1e-8, param_count)
    }

    pub fn with_config(
        learning_rate: f64,
        rho: f64,
        epsilon: f64,
        param_count: usize,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) || rho == 0.0 {
            return Err(Error::Config(format!("rmsprop rho {rho} not in (0,1)")));
        }
        if epsilon <= 0.0 {
            return Err(Error::Config(format!("rmsprop epsilon {epsilon} <= 0")));
        }
        if learning_rate < 0.0 || !learning_rate.is_finite() {
            return Err(Error::Config(format!(
                "rmsprop learning rate {learning_rate} negative or non-finite"
            )));
        }
        Ok(RmsProp {
            learning_rate,
            rho,
            epsilon,
            acc: vec![0.0; param_count],
        })
    }

    pub fn accumulator(&self) -> &[f64] {
        &self.acc
    }

    /// One in-place update step.
    pub fn update(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.acc.len() || grads.len() != self.acc.len() {
            return Err(Error::DimMismatch(format!(
                "rmsprop: params {} / grads {} vs state {}",
                params.len(),
                grads.len(),
                self.acc.len()
            )));
        }
        for i in 0..params.len() {
            let g = grads[i];
            self.acc[i] = self.rho * self.acc[i] + (1.0 - self.rho) * g * g;
            params[i] -= self.learning_rate * g / (self.acc[i] + self.epsilon).sqrt();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params_and_decays_accumulator() {
        let mut opt = RmsProp::new(0.01, 2).unwrap();
        let mut params = vec![1.0, -2.0];
        opt.update(&mut params, &[1.0, 1.0]).unwrap();
        let acc_before = opt.accumulator().to_vec();
        let params_before = params.clone();
        opt.update(&mut params, &[0.0, 0.0]).unwrap();
        assert_eq!(params, params_before);
        for (a, b) in opt.accumulator().iter().zip(&acc_before) {
            assert!((a - 0.9 * b).abs() < 1e-15);
        }
    }

    #[test]
    fn first_step_hand_case() {
        // acc = 0.1, theta = -0.002 / sqrt(0.1 + 1e-8).
        let mut opt = RmsProp::with_config(0.002, 0.9, 1e-8, 1).unwrap();
        let mut params = vec![0.0];
        opt.update(&mut params, &[1.0]).unwrap();
        assert!((opt.accumulator()[0] - 0.1).abs() < 1e-15);
        let expected = -0.002 / (0.1f64 + 1e-8).sqrt();
        assert!((params[0] - expected).abs() < 1e-15);
        assert!((params[0] + 0.006325).abs() < 1e-6);
    }

    #[test]
    fn first_step_magnitude_is_bounded() {
        // |delta| = lr * |g| / sqrt((1-rho) g^2 + eps) <= lr / sqrt(1-rho).
        let mut opt = RmsProp::with_config(0.002, 0.9, 1e-8, 3).unwrap();
        let mut params = vec![0.0; 3];
        opt.update(&mut params, &[100.0, -0.5, 1e-3]).unwrap();
        let bound = 0.002 / (1.0f64 - 0.9).sqrt() + 1e-9;
        for p in &params {
            assert!(p.abs() <= bound);
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut opt = RmsProp::new(0.01, 2).unwrap();
        let mut params = vec![0.0; 3];
        assert!(opt.update(&mut params, &[0.0; 3]).is_err());
    }

    #[test]
    fn invalid_constants_rejected() {
        assert!(RmsProp::with_config(0.01, 1.0, 1e-8, 1).is_err());
        assert!(RmsProp::with_config(0.01, 0.9, 0.0, 1).is_err());
        assert!(RmsProp::with_config(-0.01, 0.9, 1e-8, 1).is_err());
    }
}
