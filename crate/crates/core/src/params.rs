//! Flattening of structured parameters into contiguous vectors.
//!
//! The optimizer and the finite-difference checks both want one flat view of
//! every trainable scalar; the layout is fixed by the traversal order below
//! and shared between a parameter set and its gradients.

use crate::dense::DenseParams;
use crate::error::{Error, Result};
use crate::gru::{GruCellParams, GruStack};
use crate::linalg::Matrix;

pub trait FlattenParams {
    fn param_count(&self) -> usize;
    fn append_flat(&self, out: &mut Vec<f64>);
    fn read_flat(&mut self, cursor: &mut FlatCursor<'_>) -> Result<()>;
}

/// Sequential reader over a flat parameter slice.
pub struct FlatCursor<'a> {
    data: &'a [f64],
    pos: usize,
}

impl<'a> FlatCursor<'a> {
    pub fn new(data: &'a [f64]) -> Self {
        FlatCursor { data, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [f64]> {
        if self.pos + n > self.data.len() {
            return Err(Error::Internal(format!(
                "flat cursor exhausted: need {n} at {}, have {}",
                self.pos,
                self.data.len()
            )));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Internal(format!(
                "flat cursor: {} of {} values consumed",
                self.pos,
                self.data.len()
            )));
        }
        Ok(())
    }
}

pub fn to_flat(p: &impl FlattenParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.param_count());
    p.append_flat(&mut out);
    out
}

pub fn assign_from_flat(p: &mut impl FlattenParams, flat: &[f64]) -> Result<()> {
    let mut cursor = FlatCursor::new(flat);
    p.read_flat(&mut cursor)?;
    cursor.finish()
}

impl FlattenParams for Matrix {
    fn param_count(&self) -> usize {
        self.data().len()
    }

    fn append_flat(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self.data());
    }

    fn read_flat(&mut self, cursor: &mut FlatCursor<'_>) -> Result<()> {
        let n = self.data().len();
        let src = cursor.take(n)?;
        self.data_mut().copy_from_slice(src);
        Ok(())
    }
}

impl FlattenParams for Vec<f64> {
    fn param_count(&self) -> usize {
        self.len()
    }

    fn append_flat(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self);
    }

    fn read_flat(&mut self, cursor: &mut FlatCursor<'_>) -> Result<()> {
        let n = self.len();
        let src = cursor.take(n)?;
        self.copy_from_slice(src);
        Ok(())
    }
}

impl FlattenParams for GruCellParams {
    fn param_count(&self) -> usize {
        self.wz.param_count() * 3 + self.uz.param_count() * 3 + self.bz.len() * 3
    }

    fn append_flat(&self, out: &mut Vec<f64>) {
        for m in [&self.wz, &self.wr, &self.wh, &self.uz, &self.ur, &self.uh] {
            m.append_flat(out);
        }
        for b in [&self.bz, &self.br, &self.bh] {
            b.append_flat(out);
        }
    }

    fn read_flat(&mut self, cursor: &mut FlatCursor<'_>) -> Result<()> {
        for m in [
            &mut self.wz,
            &mut self.wr,
            &mut self.wh,
            &mut self.uz,
            &mut self.ur,
            &mut self.uh,
        ] {
            m.read_flat(cursor)?;
        }
        for b in [&mut self.bz, &mut self.br, &mut self.bh] {
            b.read_flat(cursor)?;
        }
        Ok(())
    }
}

impl FlattenParams for GruStack {
    fn param_count(&self) -> usize {
        self.layers.iter().map(FlattenParams::param_count).sum()
    }

    fn append_flat(&self, out: &mut Vec<f64>) {
        for l in &self.layers {
            l.append_flat(out);
        }
    }

    fn read_flat(&mut self, cursor: &mut FlatCursor<'_>) -> Result<()> {
        for l in &mut self.layers {
            l.read_flat(cursor)?;
        }
        Ok(())
    }
}

impl FlattenParams for DenseParams {
    fn param_count(&self) -> usize {
        self.weights.param_count() + self.bias.len()
    }

    fn append_flat(&self, out: &mut Vec<f64>) {
        self.weights.append_flat(out);
        self.bias.append_flat(out);
    }

    fn read_flat(&mut self, cursor: &mut FlatCursor<'_>) -> Result<()> {
        self.weights.read_flat(cursor)?;
        self.bias.read_flat(cursor)
    }
}
