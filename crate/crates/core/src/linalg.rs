//! Dense row-major matrices and small slice helpers.
//!
//! Everything is `f64`; gradient checks against finite differences are only
//! meaningful at that precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimMismatch("ragged rows in matrix literal".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `out += A x`.
    pub fn matvec_add(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "matvec input dim");
        assert_eq!(out.len(), self.rows, "matvec output dim");
        if self.cols == 0 {
            return;
        }
        for (out_r, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            let mut acc = 0.0;
            for (w, v) in row.iter().zip(x) {
                acc += w * v;
            }
            *out_r += acc;
        }
    }

    /// `A x` as a fresh vector.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.matvec_add(x, &mut out);
        out
    }

    /// `out += Aᵀ x`; the workhorse of backpropagation.
    pub fn tr_matvec_add(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.rows, "tr_matvec input dim");
        assert_eq!(out.len(), self.cols, "tr_matvec output dim");
        if self.cols == 0 {
            return;
        }
        for (&xr, row) in x.iter().zip(self.data.chunks_exact(self.cols)) {
            if xr == 0.0 {
                continue;
            }
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * xr;
            }
        }
    }

    /// Rank-one update `A += u vᵀ`; accumulates weight gradients.
    pub fn add_outer(&mut self, u: &[f64], v: &[f64]) {
        assert_eq!(u.len(), self.rows, "outer row dim");
        assert_eq!(v.len(), self.cols, "outer col dim");
        if self.cols == 0 {
            return;
        }
        for (&ur, row) in u.iter().zip(self.data.chunks_exact_mut(self.cols)) {
            if ur == 0.0 {
                continue;
            }
            for (w, x) in row.iter_mut().zip(v) {
                *w += ur * x;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot length");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a += b` element-wise.
pub fn add_assign(a: &mut [f64], b: &[f64]) {
    assert_eq!(a.len(), b.len(), "add_assign length");
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}
