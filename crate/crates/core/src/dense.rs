//! Affine layers: the output head and the context projection.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add_assign, Matrix};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseParams {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl DenseParams {
    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        DenseParams {
            weights: Matrix::zeros(out_dim, in_dim),
            bias: vec![0.0; out_dim],
        }
    }

    pub fn glorot(out_dim: usize, in_dim: usize, rng: &mut impl Rng) -> Self {
        let bound = (6.0 / (in_dim + out_dim).max(1) as f64).sqrt();
        let mut p = Self::zeros(out_dim, in_dim);
        for v in p.weights.data_mut() {
            *v = rng.random_range(-bound..bound);
        }
        p
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    /// `W v + b`.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.in_dim() {
            return Err(Error::DimMismatch(format!(
                "dense forward: input dim {} != {}",
                input.len(),
                self.in_dim()
            )));
        }
        let mut out = self.bias.clone();
        self.weights.matvec_add(input, &mut out);
        Ok(out)
    }

    /// Gradients for one forward call; returns `(param grads, d_input)`.
    pub fn backward(&self, input: &[f64], d_out: &[f64]) -> Result<(DenseParams, Vec<f64>)> {
        if d_out.len() != self.out_dim() || input.len() != self.in_dim() {
            return Err(Error::DimMismatch("dense backward shapes".into()));
        }
        let mut grads = self.zeros_like();
        grads.weights.add_outer(d_out, input);
        add_assign(&mut grads.bias, d_out);
        let mut d_input = vec![0.0; self.in_dim()];
        self.weights.tr_matvec_add(d_out, &mut d_input);
        Ok((grads, d_input))
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.out_dim(), self.in_dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_passes_input_through() {
        let mut p = DenseParams::zeros(3, 3);
        for i in 0..3 {
            p.weights.set(i, i, 1.0);
        }
        let v = vec![0.5, -1.0, 2.0];
        assert_eq!(p.forward(&v).unwrap(), v);
    }

    #[test]
    fn zero_params_give_zero_output() {
        let p = DenseParams::zeros(2, 4);
        assert_eq!(p.forward(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn backward_shapes_and_values() {
        let mut p = DenseParams::zeros(1, 2);
        p.weights.set(0, 0, 2.0);
        p.weights.set(0, 1, -1.0);
        let (grads, d_in) = p.backward(&[3.0, 4.0], &[1.0]).unwrap();
        assert_eq!(grads.weights.data(), &[3.0, 4.0]);
        assert_eq!(grads.bias, vec![1.0]);
        assert_eq!(d_in, vec![2.0, -1.0]);
    }
}
