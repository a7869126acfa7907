//! Seasonal multi-encoder encoder-decoder forecasting.
//!
//! This crate implements the SEDX family of multi-step forecasters for
//! seasonal time series with exogenous inputs, together with the pieces
//! needed to train and evaluate them from scratch:
//!
//! - [`linalg`], [`gru`], [`dense`], [`loss`], [`rmsprop`]: a framework-free
//!   differentiable substrate (dense matrices, GRU cells with exact BPTT
//!   gradients, affine output heads, mean squared error, RMSProp).
//! - [`series`], [`window`]: seasonal lag bookkeeping that splits a series
//!   into per-encoder input blocks, synchronized decoder inputs, and
//!   multi-step targets.
//! - [`model`]: the SEDX network (one GRU encoder per seasonal cycle plus one
//!   for the standard lags, context projection, GRU decoder, scalar head) and
//!   its BEDX ablation.
//! - [`train`]: mini-batch BPTT training with RMSProp and best-validation
//!   checkpointing.
//! - [`sarx`], [`stats`]: the linear seasonal-AR baseline (least-squares fit,
//!   recursive multi-step prediction, synthetic data generation), the
//!   copy-previous predictor, and ACF/PACF diagnostics.
//! - [`metrics`]: MASE, MAPE, total variation, Welch's t-test, and
//!   cross-method summaries.
//! - [`scale`], [`grouping`]: per-sequence min-max scaling and the greedy
//!   recursive construction of background models covering a corpus.

pub mod dense;
pub mod error;
pub mod grouping;
pub mod gru;
pub mod linalg;
pub mod loss;
pub mod lstsq;
pub mod metrics;
pub mod model;
pub mod params;
pub mod rmsprop;
pub mod sarx;
pub mod scale;
pub mod series;
pub mod stats;
pub mod train;
pub mod window;

pub use error::{Error, Result};
