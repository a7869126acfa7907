//! GRU cells, stacked GRU sequences, and exact BPTT gradients.
//!
//! One cell computes, for input `u` and previous state `h_prev`:
//!
//! ```text
//! z = sigmoid(Wz u + Uz h_prev + bz)        update gate
//! r = sigmoid(Wr u + Ur h_prev + br)        reset gate
//! c = tanh(W u + r .* (U h_prev) + b)       candidate state
//! h = z .* h_prev + (1 - z) .* c
//! ```
//!
//! so `h` is a per-coordinate convex combination of the previous state and
//! the candidate, with `z` pulling toward the previous state. Biases are
//! zero-initializable, which recovers the bias-free formulation exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add_assign, Matrix};

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Weights of one GRU cell. `w*` are hidden x input, `u*` hidden x hidden.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GruCellParams {
    pub wz: Matrix,
    pub wr: Matrix,
    pub wh: Matrix,
    pub uz: Matrix,
    pub ur: Matrix,
    pub uh: Matrix,
    pub bz: Vec<f64>,
    pub br: Vec<f64>,
    pub bh: Vec<f64>,
}

impl GruCellParams {
    pub fn zeros(hidden: usize, input: usize) -> Self {
        GruCellParams {
            wz: Matrix::zeros(hidden, input),
            wr: Matrix::zeros(hidden, input),
            wh: Matrix::zeros(hidden, input),
            uz: Matrix::zeros(hidden, hidden),
            ur: Matrix::zeros(hidden, hidden),
            uh: Matrix::zeros(hidden, hidden),
            bz: vec![0.0; hidden],
            br: vec![0.0; hidden],
            bh: vec![0.0; hidden],
        }
    }

    /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    pub fn glorot(hidden: usize, input: usize, rng: &mut impl Rng) -> Self {
        let mut cell = Self::zeros(hidden, input);
        let ws = glorot_bound(input, hidden);
        let us = glorot_bound(hidden, hidden);
        for m in [&mut cell.wz, &mut cell.wr, &mut cell.wh] {
            fill_uniform(m, ws, rng);
        }
        for m in [&mut cell.uz, &mut cell.ur, &mut cell.uh] {
            fill_uniform(m, us, rng);
        }
        cell
    }

    pub fn hidden_dim(&self) -> usize {
        self.wz.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.wz.cols()
    }

    /// One forward step.
    pub fn step(&self, h_prev: &[f64], input: &[f64]) -> Result<(Vec<f64>, GruActivations)> {
        let hidden = self.hidden_dim();
        if h_prev.len() != hidden {
            return Err(Error::DimMismatch(format!(
                "gru step: state dim {} != hidden dim {}",
                h_prev.len(),
                hidden
            )));
        }
        if input.len() != self.input_dim() {
            return Err(Error::DimMismatch(format!(
                "gru step: input dim {} != weight input dim {}",
                input.len(),
                self.input_dim()
            )));
        }

        let mut az = self.bz.clone();
        self.wz.matvec_add(input, &mut az);
        self.uz.matvec_add(h_prev, &mut az);
        let update: Vec<f64> = az.iter().map(|&v| sigmoid(v)).collect();

        let mut ar = self.br.clone();
        self.wr.matvec_add(input, &mut ar);
        self.ur.matvec_add(h_prev, &mut ar);
        let reset: Vec<f64> = ar.iter().map(|&v| sigmoid(v)).collect();

        let recur = self.uh.matvec(h_prev);
        let mut ac = self.bh.clone();
        self.wh.matvec_add(input, &mut ac);
        for i in 0..hidden {
            ac[i] += reset[i] * recur[i];
        }
        let candidate: Vec<f64> = ac.iter().map(|&v| v.tanh()).collect();

        let hidden_state: Vec<f64> = (0..hidden)
            .map(|i| update[i] * h_prev[i] + (1.0 - update[i]) * candidate[i])
            .collect();

        Ok((
            hidden_state.clone(),
            GruActivations {
                update,
                reset,
                candidate,
                hidden: hidden_state,
                recur,
            },
        ))
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.hidden_dim(), self.input_dim())
    }
}

fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out).max(1) as f64).sqrt()
}

fn fill_uniform(m: &mut Matrix, bound: f64, rng: &mut impl Rng) {
    for v in m.data_mut() {
        *v = rng.random_range(-bound..bound);
    }
}

/// Per-step activations cached for BPTT.
///
/// `recur` holds `U h_prev`, needed for the reset-gate gradient.
#[derive(Clone, Debug)]
pub struct GruActivations {
    pub update: Vec<f64>,
    pub reset: Vec<f64>,
    pub candidate: Vec<f64>,
    pub hidden: Vec<f64>,
    pub recur: Vec<f64>,
}

/// Forward trace of one cell over a sequence.
#[derive(Clone, Debug)]
pub struct GruSequenceCache {
    pub h0: Vec<f64>,
    pub inputs: Vec<Vec<f64>>,
    pub steps: Vec<GruActivations>,
}

impl GruSequenceCache {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn hidden(&self, t: usize) -> &[f64] {
        &self.steps[t].hidden
    }

    pub fn final_hidden(&self) -> &[f64] {
        &self.steps.last().expect("non-empty sequence").hidden
    }

    fn h_prev(&self, t: usize) -> &[f64] {
        if t == 0 {
            &self.h0
        } else {
            &self.steps[t - 1].hidden
        }
    }
}

/// Unrolls one cell over `inputs` starting from `h0`.
pub fn gru_sequence_forward(
    cell: &GruCellParams,
    h0: Vec<f64>,
    inputs: Vec<Vec<f64>>,
) -> Result<GruSequenceCache> {
    if inputs.is_empty() {
        return Err(Error::Config("empty input sequence for GRU".into()));
    }
    let mut steps = Vec::with_capacity(inputs.len());
    let mut state = h0.clone();
    for input in &inputs {
        let (next, acts) = cell.step(&state, input)?;
        steps.push(acts);
        state = next;
    }
    Ok(GruSequenceCache { h0, inputs, steps })
}

/// Gradients flowing out of [`gru_sequence_backward`].
#[derive(Clone, Debug)]
pub struct GruBackward {
    pub grads: GruCellParams,
    pub d_inputs: Vec<Vec<f64>>,
    pub d_h0: Vec<f64>,
}

/// Exact reverse-mode sweep through the forward recurrence.
///
/// `upstream[t]` is the loss gradient on the hidden state after step `t`;
/// pass zeros for steps that do not feed the loss directly.
pub fn gru_sequence_backward(
    cell: &GruCellParams,
    cache: &GruSequenceCache,
    upstream: &[Vec<f64>],
) -> Result<GruBackward> {
    let steps = cache.len();
    if upstream.len() != steps {
        return Err(Error::Internal(format!(
            "upstream gradients for {} steps, cache has {}",
            upstream.len(),
            steps
        )));
    }
    let hidden = cell.hidden_dim();
    let input_dim = cell.input_dim();
    let mut grads = cell.zeros_like();
    let mut d_inputs = vec![vec![0.0; input_dim]; steps];
    let mut carry = vec![0.0; hidden];

    for t in (0..steps).rev() {
        let acts = &cache.steps[t];
        let h_prev = cache.h_prev(t);
        let input = &cache.inputs[t];

        let mut dh = carry;
        add_assign(&mut dh, &upstream[t]);

        let mut d_h_prev = vec![0.0; hidden];
        let mut daz = vec![0.0; hidden];
        let mut dar = vec![0.0; hidden];
        let mut dac = vec![0.0; hidden];
        for i in 0..hidden {
            let z = acts.update[i];
            let r = acts.reset[i];
            let c = acts.candidate[i];
            let dz = dh[i] * (h_prev[i] - c);
            let dc = dh[i] * (1.0 - z);
            d_h_prev[i] += dh[i] * z;
            dac[i] = dc * (1.0 - c * c);
            dar[i] = dac[i] * acts.recur[i] * r * (1.0 - r);
            daz[i] = dz * z * (1.0 - z);
        }
        // Candidate path: d(U h_prev) = dac .* r.
        let d_recur: Vec<f64> = (0..hidden).map(|i| dac[i] * acts.reset[i]).collect();

        grads.wh.add_outer(&dac, input);
        add_assign(&mut grads.bh, &dac);
        cell.wh.tr_matvec_add(&dac, &mut d_inputs[t]);
        grads.uh.add_outer(&d_recur, h_prev);
        cell.uh.tr_matvec_add(&d_recur, &mut d_h_prev);

        grads.wr.add_outer(&dar, input);
        add_assign(&mut grads.br, &dar);
        cell.wr.tr_matvec_add(&dar, &mut d_inputs[t]);
        grads.ur.add_outer(&dar, h_prev);
        cell.ur.tr_matvec_add(&dar, &mut d_h_prev);

        grads.wz.add_outer(&daz, input);
        add_assign(&mut grads.bz, &daz);
        cell.wz.tr_matvec_add(&daz, &mut d_inputs[t]);
        grads.uz.add_outer(&daz, h_prev);
        cell.uz.tr_matvec_add(&daz, &mut d_h_prev);

        carry = d_h_prev;
    }

    Ok(GruBackward {
        grads,
        d_inputs,
        d_h0: carry,
    })
}

/// Stack of GRU layers; layer l+1 consumes layer l's hidden states.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GruStack {
    pub layers: Vec<GruCellParams>,
}

impl GruStack {
    pub fn zeros(layers: usize, hidden: usize, input: usize) -> Self {
        GruStack {
            layers: (0..layers)
                .map(|l| GruCellParams::zeros(hidden, if l == 0 { input } else { hidden }))
                .collect(),
        }
    }

    pub fn glorot(layers: usize, hidden: usize, input: usize, rng: &mut impl Rng) -> Self {
        GruStack {
            layers: (0..layers)
                .map(|l| GruCellParams::glorot(hidden, if l == 0 { input } else { hidden }, rng))
                .collect(),
        }
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn hidden_dim(&self) -> usize {
        self.layers[0].hidden_dim()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    /// Unrolls the whole stack. `h0` holds one initial state per layer.
    pub fn forward(&self, h0: &[Vec<f64>], inputs: &[Vec<f64>]) -> Result<GruStackCache> {
        if h0.len() != self.layer_count() {
            return Err(Error::DimMismatch(format!(
                "{} initial states for {} layers",
                h0.len(),
                self.layer_count()
            )));
        }
        let mut caches = Vec::with_capacity(self.layer_count());
        let mut seq: Vec<Vec<f64>> = inputs.to_vec();
        for (cell, init) in self.layers.iter().zip(h0) {
            let cache = gru_sequence_forward(cell, init.clone(), seq)?;
            seq = cache.steps.iter().map(|a| a.hidden.clone()).collect();
            caches.push(cache);
        }
        Ok(GruStackCache { layers: caches })
    }

    /// Reverse sweep through all layers.
    ///
    /// `upstream_top[t]` is the gradient on the top layer's hidden state at
    /// step `t`; `upstream_final`, when present, adds one gradient per layer
    /// on that layer's final hidden state (how encoder context gradients
    /// enter).
    pub fn backward(
        &self,
        cache: &GruStackCache,
        upstream_top: &[Vec<f64>],
        upstream_final: Option<&[Vec<f64>]>,
    ) -> Result<GruStackBackward> {
        let steps = cache.layers[0].len();
        let mut grads = Vec::with_capacity(self.layer_count());
        let mut d_h0 = vec![Vec::new(); self.layer_count()];
        let mut downstream: Vec<Vec<f64>> = upstream_top.to_vec();

        for (l, cell) in self.layers.iter().enumerate().rev() {
            if let Some(finals) = upstream_final {
                add_assign(&mut downstream[steps - 1], &finals[l]);
            }
            let back = gru_sequence_backward(cell, &cache.layers[l], &downstream)?;
            grads.push(back.grads);
            d_h0[l] = back.d_h0;
            downstream = back.d_inputs;
        }
        grads.reverse();

        Ok(GruStackBackward {
            grads,
            d_inputs: downstream,
            d_h0,
        })
    }
}

/// Forward trace of a stack (one sequence cache per layer).
#[derive(Clone, Debug)]
pub struct GruStackCache {
    pub layers: Vec<GruSequenceCache>,
}

impl GruStackCache {
    pub fn top(&self) -> &GruSequenceCache {
        self.layers.last().expect("stack has layers")
    }

    /// Final hidden state of every layer, bottom first.
    pub fn final_states(&self) -> Vec<&[f64]> {
        self.layers.iter().map(|c| c.final_hidden()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct GruStackBackward {
    pub grads: Vec<GruCellParams>,
    pub d_inputs: Vec<Vec<f64>>,
    pub d_h0: Vec<Vec<f64>>,
}
