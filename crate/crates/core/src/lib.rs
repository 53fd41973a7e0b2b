//! Multimode two-photon Mach–Zehnder interferometry with engineered spatial
//! modes: exact state model, Fisher information, spatially resolved
//! detection, phase estimation and the three-photon extension.

pub mod cli;
pub mod error;
pub mod estimation;
pub mod fisher;
pub mod model;
pub mod numeric;
pub mod quadrature;
pub mod spatial;
pub mod three_photon;
mod trig;

pub use error::{Error, Result};
pub use model::{
    beam_splitter_matrix, coincidence_probability, conditional_density_matrix, double_probability,
    output_amplitudes, ConditionalDensityMatrix, InterferometerParams, TwoPhotonAmplitudes,
};
