//! Errors shared across the crate.

use thiserror::Error;

/// Errors returned by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of two cooperating values disagree (weights vs. input, params
    /// vs. gradients, ...).
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// A configuration value violates its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A window cannot be assembled at the requested anchor.
    #[error("window out of range at anchor {anchor}: {bound}")]
    WindowOutOfRange { anchor: usize, bound: String },

    /// Multi-step prediction needs exogenous inputs past the end of the
    /// series.
    #[error("exogenous horizon unavailable: need x up to t={needed}, series ends at t={last}")]
    ExogenousHorizonUnavailable { needed: usize, last: usize },

    /// The training loss left the finite range.
    #[error("divergence: non-finite loss at epoch {epoch}, batch {batch}")]
    Divergence { epoch: usize, batch: usize },

    /// MAPE is undefined when an actual value is zero.
    #[error("undefined MAPE: actual at step {index} is zero")]
    UndefinedMape { index: usize },

    /// MASE is undefined when the training segment has no lag-k variation.
    #[error("undefined MASE: training reference is constant at lag {lag}")]
    ZeroMaseDenominator { lag: usize },

    /// Least squares hit a (numerically) collinear column.
    #[error("rank-deficient regression: column '{column}' is collinear with earlier columns")]
    RankDeficient { column: String },

    /// The simulated recurrence exploded.
    #[error("unstable simulation: |y({t})| exceeded {limit:e}")]
    UnstableSimulation { t: usize, limit: f64 },

    /// A statistical test received a sample it cannot handle.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// Broken internal assumption (missing cache, exhausted cursor, ...).
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
