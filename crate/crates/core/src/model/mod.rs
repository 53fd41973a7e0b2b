//! Exact two-photon model of a Mach–Zehnder interferometer with a spectral
//! (inaccessible) and a spatial (engineered) degree of freedom.
//!
//! The upper-path photon occupies spectral mode 1 and spatial mode R. The
//! lower-path photon is in spectral mode 1 with weight `V` (otherwise in the
//! orthogonal mode 2), and in spatial mode R with weight `D` (otherwise in the
//! orthogonal mode L). The interferometer acts on each pair of matched modes
//! `(a_μ, b_μ)` with the real involutory matrix of [`beam_splitter_matrix`].

mod amplitudes;
mod density;
pub mod fock;

pub use amplitudes::{output_amplitudes, DoubleKey, TwoPhotonAmplitudes};
pub use density::{
    conditional_density_matrix, conditional_density_matrix_derivative,
    conditional_density_matrix_second_derivative, ConditionalDensityMatrix, SpatialPair,
};
pub use fock::{brute_force_oracle, FockState};

use serde::Serialize;

use crate::error::{check_phase, check_unit_interval, Result};
use crate::trig::PhaseTrig;

/// Operating point `θ`, spectral visibility `V` and spatial overlap `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferometerParams {
    theta: f64,
    visibility: f64,
    overlap: f64,
}

impl InterferometerParams {
    pub fn new(theta: f64, visibility: f64, overlap: f64) -> Result<Self> {
        Ok(Self {
            theta: check_phase("theta", theta)?,
            visibility: check_unit_interval("visibility", visibility)?,
            overlap: check_unit_interval("overlap", overlap)?,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(theta, self.visibility, self.overlap)
    }

    pub fn with_overlap(&self, overlap: f64) -> Result<Self> {
        Self::new(self.theta, self.visibility, overlap)
    }

    /// Fraction of pairs that interfere fully: `D·V`.
    pub(crate) fn coherence(&self) -> f64 {
        self.overlap * self.visibility
    }

    pub(crate) fn trig(&self) -> PhaseTrig {
        PhaseTrig::new(self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Path {
    /// Upper path, operators `a`.
    Upper,
    /// Lower path, operators `b`.
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Spectral {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Spatial {
    R,
    L,
}

/// Spectral and spatial label of a mode within one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LocalMode {
    pub spectral: Spectral,
    pub spatial: Spatial,
}

impl LocalMode {
    pub const ALL: [LocalMode; 4] = [
        LocalMode::new(Spectral::One, Spatial::R),
        LocalMode::new(Spectral::One, Spatial::L),
        LocalMode::new(Spectral::Two, Spatial::R),
        LocalMode::new(Spectral::Two, Spatial::L),
    ];

    pub const fn new(spectral: Spectral, spatial: Spatial) -> Self {
        Self { spectral, spatial }
    }

    pub fn index(self) -> usize {
        let s = match self.spectral {
            Spectral::One => 0,
            Spectral::Two => 2,
        };
        s + match self.spatial {
            Spatial::R => 0,
            Spatial::L => 1,
        }
    }
}

/// One of the eight orthogonal single-photon modes `μ = (path, i, χ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ModeIndex {
    pub path: Path,
    pub local: LocalMode,
}

impl ModeIndex {
    pub const COUNT: usize = 8;

    pub const fn new(path: Path, spectral: Spectral, spatial: Spatial) -> Self {
        Self {
            path,
            local: LocalMode::new(spectral, spatial),
        }
    }

    pub fn all() -> impl Iterator<Item = ModeIndex> {
        [Path::Upper, Path::Lower].into_iter().flat_map(|path| {
            LocalMode::ALL
                .into_iter()
                .map(move |local| ModeIndex { path, local })
        })
    }

    pub fn index(self) -> usize {
        let p = match self.path {
            Path::Upper => 0,
            Path::Lower => 4,
        };
        p + self.local.index()
    }

    /// The matched mode in the other path.
    pub fn partner(self) -> ModeIndex {
        ModeIndex {
            path: match self.path {
                Path::Upper => Path::Lower,
                Path::Lower => Path::Upper,
            },
            local: self.local,
        }
    }
}

/// Interferometer transformation of one matched mode pair:
/// `[[cos θ/2, sin θ/2], [sin θ/2, −cos θ/2]]`.
pub fn beam_splitter_matrix(theta: f64) -> [[f64; 2]; 2] {
    let t = PhaseTrig::new(theta);
    [[t.cos_half, t.sin_half], [t.sin_half, -t.cos_half]]
}

/// Probability that the photons leave through different ports,
/// `1 − ½(1 + D·V) sin²θ`.
pub fn coincidence_probability(params: &InterferometerParams) -> f64 {
    1.0 - double_probability(params)
}

/// Probability that both photons leave through the same port,
/// `½(1 + D·V) sin²θ`.
pub fn double_probability(params: &InterferometerParams) -> f64 {
    let s = params.trig().sin;
    0.5 * (1.0 + params.coherence()) * s * s
}

/// `d p_d / dθ`; the coincidence derivative is its negative.
pub fn double_probability_derivative(params: &InterferometerParams) -> f64 {
    0.5 * (1.0 + params.coherence()) * params.trig().sin_double()
}

/// `d² p_d / dθ²`.
pub fn double_probability_second_derivative(params: &InterferometerParams) -> f64 {
    let t = params.trig();
    (1.0 + params.coherence()) * (t.cos * t.cos - t.sin * t.sin)
}
