use serde::Serialize;

use crate::error::{Error, Result};
use crate::spatial::SpatialModePair;

/// Symmetric binning of `ξ/σ` on `[−half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinSpec {
    pub half_width: f64,
    /// Target bin width; rounded so that an integer number of bins fits.
    pub bin_width: f64,
}

impl BinSpec {
    pub const DEFAULT_BIN_WIDTH: f64 = 0.2;

    /// `±(d + 6√2 σ)` with the given bin width.
    pub fn for_pair(pair: &SpatialModePair, bin_width: f64) -> Result<Self> {
        if !(bin_width.is_finite() && bin_width > 0.0) {
            return Err(Error::InvalidParameter {
                name: "bin_width",
                value: bin_width,
                reason: "must be positive and finite",
            });
        }
        Ok(Self {
            half_width: pair.d_over_sigma() + 6.0 * std::f64::consts::SQRT_2,
            bin_width,
        })
    }

    /// Edges mirror-symmetric about zero bit for bit.
    pub fn edges(&self) -> Vec<f64> {
        let n = ((2.0 * self.half_width / self.bin_width).round() as usize).max(1);
        (0..=n)
            .map(|i| self.half_width * (2.0 * i as f64 - n as f64) / n as f64)
            .collect()
    }
}

/// Counts of `ξ` values per bin.
///
/// `events` is the number of detection events (of any kind) the counts were
/// taken from; relative frequencies are per event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
    events: u64,
}

impl Histogram {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("histogram edges must be strictly increasing".into()));
        }
        let bins = edges.len() - 1;
        Ok(Self {
            edges,
            counts: vec![0; bins],
            total: 0,
            events: 0,
        })
    }

    /// Bins the relative positions of the coincidences among `events`.
    pub fn from_events(edges: Vec<f64>, events: &[super::EventRecord]) -> Result<Self> {
        let mut h = Self::new(edges)?;
        for e in events {
            h.events += 1;
            if let Some(xi) = e.xi() {
                h.insert(xi);
            }
        }
        Ok(h)
    }

    fn insert(&mut self, xi: f64) {
        if let Some(b) = self.bin_of(xi) {
            self.counts[b] += 1;
            self.total += 1;
        }
    }

    pub fn bin_of(&self, xi: f64) -> Option<usize> {
        let lo = self.edges[0];
        let hi = *self.edges.last().expect("at least two edges");
        if !(xi >= lo && xi < hi) {
            return None;
        }
        let width = (hi - lo) / self.counts.len() as f64;
        let mut b = (((xi - lo) / width) as usize).min(self.counts.len() - 1);
        // Guard against rounding at bin boundaries.
        while b > 0 && xi < self.edges[b] {
            b -= 1;
        }
        while b + 1 < self.counts.len() && xi >= self.edges[b + 1] {
            b += 1;
        }
        Some(b)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }
}
