//! Simulated detection events and phase estimation from them.
//!
//! Events are sampled from the spatial coincidence model, binned in the
//! relative position `ξ`, and fed to the locally unbiased estimator in subsets
//! of a fixed number of events. A maximum-likelihood fit of `(θ, V)` is
//! provided for calibration.

mod estimator;
mod histogram;
mod io;
mod mlfit;
mod pipeline;
mod sampler;

pub(crate) use io::write_events;

pub use estimator::{expected_bin_probabilities, unbiased_estimate, LocalEstimator};
pub use histogram::{BinSpec, Histogram};
pub use io::{export_events, ingest_events, EventFile, EVENT_HEADER};
pub use mlfit::{max_likelihood_fit, MlFit};
pub use pipeline::{
    bootstrap_epsilon, precision_pipeline, precision_pipeline_by_phase, EstimationReport,
    PipelineConfig,
};
pub use sampler::{sample_events, SAMPLER_BLOCK};

use serde::Serialize;

/// One detection outcome. Positions are in units of `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventRecord {
    /// Photons in different ports: upper-port position `x`, lower-port `x′`.
    Coincidence { x: f64, x_prime: f64 },
    /// Both photons in the same port; positions are not used.
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Coincidence,
    Double,
}

impl EventRecord {
    pub fn kind(&self) -> EventKind {
        match self {
            EventRecord::Coincidence { .. } => EventKind::Coincidence,
            EventRecord::Double => EventKind::Double,
        }
    }

    /// Relative position `ξ = x − x′` of a coincidence.
    pub fn xi(&self) -> Option<f64> {
        match *self {
            EventRecord::Coincidence { x, x_prime } => Some(x - x_prime),
            EventRecord::Double => None,
        }
    }
}

/// `(coincidences, doubles)` in a slice of events.
pub fn count_kinds(events: &[EventRecord]) -> (usize, usize) {
    let c = events
        .iter()
        .filter(|e| e.kind() == EventKind::Coincidence)
        .count();
    (c, events.len() - c)
}
