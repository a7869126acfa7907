//! The SEDX network and its BEDX ablation.
//!
//! One GRU encoder per seasonal cycle plus one for the standard lags, all run
//! from zero initial state. The final hidden states of every included encoder
//! (all layers) concatenate into a context vector, which a learned affine map
//! projects into the decoder's per-layer initial state. Each decoder step
//! consumes the window's synchronized inputs for that step (optionally with
//! the context appended) and a per-step affine head emits one scalar, so the
//! K+1 targets come out in one shot. No decoder step sees its own previous
//! prediction.
//!
//! Weights are shared across time steps, never across encoders, so the
//! parameter count is independent of `p`, the `Q_i`, and `K`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::DenseParams;
use crate::error::{Error, Result};
use crate::gru::{GruStack, GruStackCache};
use crate::params::{FlatCursor, FlattenParams};
use crate::series::{SeasonalSpec, TimeSeries};
use crate::window::{assemble_window, WindowExample};

/// Architecture switches that do not change with the seasonal orders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SedxConfig {
    pub hidden: usize,
    pub layers: usize,
    /// Append the context vector to every decoder step input.
    pub feed_context: bool,
    /// Include encoder 0's final states in the context. Always effectively
    /// true when there are no seasonal encoders.
    pub include_encoder0_context: bool,
}

impl Default for SedxConfig {
    fn default() -> Self {
        SedxConfig {
            hidden: 8,
            layers: 1,
            feed_context: true,
            include_encoder0_context: true,
        }
    }
}

/// All trainable weights of one SEDX (or BEDX) model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SedxParams {
    pub spec: SeasonalSpec,
    pub exo_dim: usize,
    pub config: SedxConfig,
    /// `P + 1` encoder stacks; index 0 reads the standard lags.
    pub encoders: Vec<GruStack>,
    pub decoder: GruStack,
    /// Context -> stacked decoder initial states.
    pub ctx_proj: DenseParams,
    /// Hidden -> scalar output, applied at every decoder step.
    pub head: DenseParams,
}

impl SedxParams {
    /// Fresh Glorot-initialized model for `spec` over series with `exo_dim`
    /// exogenous channels.
    pub fn init(
        spec: SeasonalSpec,
        exo_dim: usize,
        config: SedxConfig,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        spec.validate()?;
        if config.hidden == 0 || config.layers == 0 {
            return Err(Error::Config("model: hidden and layers must be >= 1".into()));
        }
        if spec.seasonal_order == 0 && !config.include_encoder0_context {
            return Err(Error::Config(
                "model: with no seasonal encoders the context must include encoder 0".into(),
            ));
        }
        let enc_input = exo_dim + 1;
        let encoders = (0..=spec.seasonal_order)
            .map(|_| GruStack::glorot(config.layers, config.hidden, enc_input, rng))
            .collect::<Vec<_>>();
        let included = if config.include_encoder0_context {
            spec.seasonal_order + 1
        } else {
            spec.seasonal_order
        };
        let ctx_dim = included * config.hidden * config.layers;
        let state_dim = config.hidden * config.layers;
        let base_dec = exo_dim + spec.seasonal_order * (exo_dim + 1);
        let dec_input = base_dec + if config.feed_context { ctx_dim } else { 0 };
        Ok(SedxParams {
            decoder: GruStack::glorot(config.layers, config.hidden, dec_input, rng),
            ctx_proj: DenseParams::glorot(state_dim, ctx_dim, rng),
            head: DenseParams::glorot(1, config.hidden, rng),
            spec,
            exo_dim,
            config,
            encoders,
        })
    }

    /// The BEDX ablation: same orders with all seasonal structure removed.
    pub fn init_bedx(
        spec: &SeasonalSpec,
        exo_dim: usize,
        mut config: SedxConfig,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        config.include_encoder0_context = true;
        Self::init(spec.without_seasonal_structure(), exo_dim, config, rng)
    }

    /// Dimensionality of the concatenated context vector.
    pub fn context_dim(&self) -> usize {
        self.included_encoders() * self.config.hidden * self.config.layers
    }

    fn included_encoders(&self) -> usize {
        if self.config.include_encoder0_context {
            self.spec.seasonal_order + 1
        } else {
            self.spec.seasonal_order
        }
    }

    fn first_included_encoder(&self) -> usize {
        usize::from(!self.config.include_encoder0_context)
    }

    /// Window-facing decoder input width, context excluded.
    pub fn base_decoder_dim(&self) -> usize {
        self.exo_dim + self.spec.seasonal_order * (self.exo_dim + 1)
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for enc in &mut z.encoders {
            for cell in &mut enc.layers {
                *cell = cell.zeros_like();
            }
        }
        for cell in &mut z.decoder.layers {
            *cell = cell.zeros_like();
        }
        z.ctx_proj = z.ctx_proj.zeros_like();
        z.head = z.head.zeros_like();
        z
    }

    fn check_window(&self, w: &WindowExample) -> Result<()> {
        if w.encoder_inputs.len() != self.encoders.len() {
            return Err(Error::DimMismatch(format!(
                "window has {} encoder blocks, model has {} encoders",
                w.encoder_inputs.len(),
                self.encoders.len()
            )));
        }
        for (e, block) in w.encoder_inputs.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::DimMismatch(format!("encoder {e} block is empty")));
            }
            if block[0].len() != self.exo_dim + 1 {
                return Err(Error::DimMismatch(format!(
                    "encoder {e} step dim {} != {}",
                    block[0].len(),
                    self.exo_dim + 1
                )));
            }
        }
        if w.decoder_inputs.len() != self.spec.k + 1 {
            return Err(Error::DimMismatch(format!(
                "window has {} decoder steps, spec K+1 = {}",
                w.decoder_inputs.len(),
                self.spec.k + 1
            )));
        }
        let base = self.base_decoder_dim();
        if w.decoder_inputs.iter().any(|v| v.len() != base) {
            return Err(Error::DimMismatch(format!(
                "decoder step dim != {base} (before context)"
            )));
        }
        Ok(())
    }

    /// Runs the network over one window; the cache feeds [`Self::backward`].
    pub fn forward(&self, w: &WindowExample) -> Result<(Vec<f64>, SedxCache)> {
        self.check_window(w)?;
        let layers = self.config.layers;
        let hidden = self.config.hidden;
        let zero_init = vec![vec![0.0; hidden]; layers];

        let mut enc_caches = Vec::with_capacity(self.encoders.len());
        for (enc, block) in self.encoders.iter().zip(&w.encoder_inputs) {
            enc_caches.push(enc.forward(&zero_init, block)?);
        }

        let mut context = Vec::with_capacity(self.context_dim());
        for cache in &enc_caches[self.first_included_encoder()..] {
            for state in cache.final_states() {
                context.extend_from_slice(state);
            }
        }

        let projected = self.ctx_proj.forward(&context)?;
        let dec_init: Vec<Vec<f64>> = projected.chunks(hidden).map(<[f64]>::to_vec).collect();

        let dec_inputs: Vec<Vec<f64>> = w
            .decoder_inputs
            .iter()
            .map(|base| {
                let mut v = base.clone();
                if self.config.feed_context {
                    v.extend_from_slice(&context);
                }
                v
            })
            .collect();
        let dec_cache = self.decoder.forward(&dec_init, &dec_inputs)?;

        let mut preds = Vec::with_capacity(self.spec.k + 1);
        for t in 0..=self.spec.k {
            preds.push(self.head.forward(dec_cache.top().hidden(t))?[0]);
        }

        Ok((
            preds,
            SedxCache {
                enc_caches,
                dec_cache,
                context,
            },
        ))
    }

    /// Exact gradients of every parameter given `d_preds`; the returned value
    /// shares this model's shape with gradients in place of weights.
    pub fn backward(&self, cache: &SedxCache, d_preds: &[f64]) -> Result<SedxParams> {
        if d_preds.len() != self.spec.k + 1 {
            return Err(Error::DimMismatch(format!(
                "{} output gradients for K+1 = {}",
                d_preds.len(),
                self.spec.k + 1
            )));
        }
        let hidden = self.config.hidden;
        let mut grads = self.zeros_like();

        // Head, and per-step gradients into the decoder's top layer.
        let mut upstream_top = Vec::with_capacity(d_preds.len());
        for (t, &dp) in d_preds.iter().enumerate() {
            let h_t = cache.dec_cache.top().hidden(t);
            let (hg, dh) = self.head.backward(h_t, &[dp])?;
            accumulate_dense(&mut grads.head, &hg);
            upstream_top.push(dh);
        }

        let dec_back = self.decoder.backward(&cache.dec_cache, &upstream_top, None)?;
        for (g, layer) in grads.decoder.layers.iter_mut().zip(dec_back.grads) {
            accumulate_cell(g, &layer);
        }

        // Context gradient: through the per-step feed and the projection.
        let mut d_context = vec![0.0; cache.context.len()];
        if self.config.feed_context {
            let base = self.base_decoder_dim();
            for d_input in &dec_back.d_inputs {
                for (i, v) in d_input[base..].iter().enumerate() {
                    d_context[i] += v;
                }
            }
        }
        let d_projected: Vec<f64> = dec_back.d_h0.concat();
        let (pg, d_ctx_proj) = self.ctx_proj.backward(&cache.context, &d_projected)?;
        accumulate_dense(&mut grads.ctx_proj, &pg);
        for (i, v) in d_ctx_proj.iter().enumerate() {
            d_context[i] += v;
        }

        // Split the context gradient back onto each encoder's final states.
        let zero_steps =
            |n: usize| -> Vec<Vec<f64>> { vec![vec![0.0; hidden]; n] };
        let mut offset = 0;
        for (e, enc) in self
            .encoders
            .iter()
            .enumerate()
            .skip(self.first_included_encoder())
        {
            let finals: Vec<Vec<f64>> = (0..self.config.layers)
                .map(|_| {
                    let s = d_context[offset..offset + hidden].to_vec();
                    offset += hidden;
                    s
                })
                .collect();
            let cache_e = &cache.enc_caches[e];
            let steps = cache_e.layers[0].len();
            let back = enc.backward(cache_e, &zero_steps(steps), Some(&finals))?;
            for (g, layer) in grads.encoders[e].layers.iter_mut().zip(back.grads) {
                accumulate_cell(g, &layer);
            }
        }

        Ok(grads)
    }

    /// Assembles the window at `anchor` and runs one forward pass.
    ///
    /// The whole exogenous horizon `x(t) .. x(t+K)` must be present.
    pub fn predict_multi_step(&self, ts: &TimeSeries, anchor: usize) -> Result<Vec<f64>> {
        if anchor + self.spec.k > ts.len().saturating_sub(1) {
            return Err(Error::ExogenousHorizonUnavailable {
                needed: anchor + self.spec.k,
                last: ts.len().saturating_sub(1),
            });
        }
        let w = assemble_window(ts, &self.spec, anchor)?;
        Ok(self.forward(&w)?.0)
    }
}

fn accumulate_dense(into: &mut DenseParams, from: &DenseParams) {
    for (a, b) in into.weights.data_mut().iter_mut().zip(from.weights.data()) {
        *a += b;
    }
    for (a, b) in into.bias.iter_mut().zip(&from.bias) {
        *a += b;
    }
}

fn accumulate_cell(into: &mut crate::gru::GruCellParams, from: &crate::gru::GruCellParams) {
    for (a, b) in [
        (&mut into.wz, &from.wz),
        (&mut into.wr, &from.wr),
        (&mut into.wh, &from.wh),
        (&mut into.uz, &from.uz),
        (&mut into.ur, &from.ur),
        (&mut into.uh, &from.uh),
    ] {
        for (x, y) in a.data_mut().iter_mut().zip(b.data()) {
            *x += y;
        }
    }
    for (a, b) in [
        (&mut into.bz, &from.bz),
        (&mut into.br, &from.br),
        (&mut into.bh, &from.bh),
    ] {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
    }
}

/// Adds `from` (a gradient-shaped [`SedxParams`]) into `into`.
pub fn accumulate_grads(into: &mut SedxParams, from: &SedxParams) {
    for (a, b) in into.encoders.iter_mut().zip(&from.encoders) {
        for (x, y) in a.layers.iter_mut().zip(&b.layers) {
            accumulate_cell(x, y);
        }
    }
    for (x, y) in into.decoder.layers.iter_mut().zip(&from.decoder.layers) {
        accumulate_cell(x, y);
    }
    accumulate_dense(&mut into.ctx_proj, &from.ctx_proj);
    accumulate_dense(&mut into.head, &from.head);
}

/// Forward trace consumed by [`SedxParams::backward`].
#[derive(Clone, Debug)]
pub struct SedxCache {
    pub enc_caches: Vec<GruStackCache>,
    pub dec_cache: GruStackCache,
    pub context: Vec<f64>,
}

impl FlattenParams for SedxParams {
    fn param_count(&self) -> usize {
        self.encoders
            .iter()
            .map(FlattenParams::param_count)
            .sum::<usize>()
            + self.decoder.param_count()
            + self.ctx_proj.param_count()
            + self.head.param_count()
    }

    fn append_flat(&self, out: &mut Vec<f64>) {
        for enc in &self.encoders {
            enc.append_flat(out);
        }
        self.decoder.append_flat(out);
        self.ctx_proj.append_flat(out);
        self.head.append_flat(out);
    }

    fn read_flat(&mut self, cursor: &mut FlatCursor<'_>) -> Result<()> {
        for enc in &mut self.encoders {
            enc.read_flat(cursor)?;
        }
        self.decoder.read_flat(cursor)?;
        self.ctx_proj.read_flat(cursor)?;
        self.head.read_flat(cursor)
    }
}
