use std::collections::BTreeMap;

use nalgebra::Matrix4;

use super::density::ConditionalDensityMatrix;
use super::{InterferometerParams, LocalMode, Path, Spatial, Spectral};

/// Two photons leaving through the same port, in the (unordered) pair of
/// local modes `first ≤ second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DoubleKey {
    pub port: Path,
    pub first: LocalMode,
    pub second: LocalMode,
}

impl DoubleKey {
    pub fn new(port: Path, x: LocalMode, y: LocalMode) -> Self {
        let (first, second) = if x <= y { (x, y) } else { (y, x) };
        Self {
            port,
            first,
            second,
        }
    }
}

/// Output state in the occupation-number basis.
///
/// `coincidence[(m, m′)]` is the amplitude of one photon in upper-port mode
/// `m` and one in lower-port mode `m′`. `double[k]` is the amplitude of the
/// normalised two-photon state of `k`; a doubly occupied mode carries the
/// bosonic `√2`. All amplitudes are real for this interferometer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TwoPhotonAmplitudes {
    pub coincidence: BTreeMap<(LocalMode, LocalMode), f64>,
    pub double: BTreeMap<DoubleKey, f64>,
}

impl TwoPhotonAmplitudes {
    pub fn coincidence_amplitude(&self, upper: LocalMode, lower: LocalMode) -> f64 {
        self.coincidence.get(&(upper, lower)).copied().unwrap_or(0.0)
    }

    pub fn double_amplitude(&self, key: DoubleKey) -> f64 {
        self.double.get(&key).copied().unwrap_or(0.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coincidence
            .values()
            .chain(self.double.values())
            .map(|a| a * a)
            .sum()
    }

    /// Largest entrywise difference over the union of both key sets.
    pub fn max_abs_diff(&self, other: &TwoPhotonAmplitudes) -> f64 {
        let c = self
            .coincidence
            .keys()
            .chain(other.coincidence.keys())
            .map(|&(m, n)| {
                (self.coincidence_amplitude(m, n) - other.coincidence_amplitude(m, n)).abs()
            });
        let d = self
            .double
            .keys()
            .chain(other.double.keys())
            .map(|&k| (self.double_amplitude(k) - other.double_amplitude(k)).abs());
        c.chain(d).fold(0.0, f64::max)
    }

    /// Spatial density matrix of the coincidence component, tracing out the
    /// spectral index of both photons.
    pub fn spatial_partial_trace(&self) -> ConditionalDensityMatrix {
        let spatial_index = |upper: Spatial, lower: Spatial| match (upper, lower) {
            (Spatial::R, Spatial::R) => 0,
            (Spatial::R, Spatial::L) => 1,
            (Spatial::L, Spatial::R) => 2,
            (Spatial::L, Spatial::L) => 3,
        };
        let spectra = [Spectral::One, Spectral::Two];
        let spatials = [Spatial::R, Spatial::L];
        let mut m = Matrix4::zeros();
        for &i in &spectra {
            for &j in &spectra {
                for &x in &spatials {
                    for &y in &spatials {
                        let ax = self.coincidence_amplitude(LocalMode::new(i, x), LocalMode::new(j, y));
                        if ax == 0.0 {
                            continue;
                        }
                        for &u in &spatials {
                            for &w in &spatials {
                                let aw = self.coincidence_amplitude(
                                    LocalMode::new(i, u),
                                    LocalMode::new(j, w),
                                );
                                m[(spatial_index(x, y), spatial_index(u, w))] += ax * aw;
                            }
                        }
                    }
                }
            }
        }
        ConditionalDensityMatrix::from_matrix(m)
    }
}

/// Lower-path single-photon wavefunction: weights over the four local modes.
pub(crate) fn lower_photon_weights(params: &InterferometerParams) -> [(LocalMode, f64); 4] {
    let v = params.visibility();
    let d = params.overlap();
    [
        (LocalMode::new(Spectral::One, Spatial::R), (d * v).sqrt()),
        (LocalMode::new(Spectral::Two, Spatial::R), (d * (1.0 - v)).sqrt()),
        (LocalMode::new(Spectral::One, Spatial::L), ((1.0 - d) * v).sqrt()),
        (LocalMode::new(Spectral::Two, Spatial::L), ((1.0 - d) * (1.0 - v)).sqrt()),
    ]
}

/// Output amplitudes from the coincidence/double expansion of the state
/// `(c a†₁R + s b†₁R) Σ_m w_m (s a†_m − c b†_m)|0⟩`.
pub fn output_amplitudes(params: &InterferometerParams) -> TwoPhotonAmplitudes {
    let t = params.trig();
    let (c, s) = (t.cos_half, t.sin_half);
    let reference = LocalMode::new(Spectral::One, Spatial::R);
    let half_sin = 0.5 * t.sin;
    let mut out = TwoPhotonAmplitudes::default();
    for (m, w) in lower_photon_weights(params) {
        if m == reference {
            out.coincidence.insert((m, m), -w * t.cos);
            let both = half_sin * w * std::f64::consts::SQRT_2;
            out.double.insert(DoubleKey::new(Path::Upper, m, m), both);
            out.double.insert(DoubleKey::new(Path::Lower, m, m), -both);
        } else {
            out.coincidence.insert((reference, m), -c * c * w);
            out.coincidence.insert((m, reference), s * s * w);
            out.double
                .insert(DoubleKey::new(Path::Upper, reference, m), half_sin * w);
            out.double
                .insert(DoubleKey::new(Path::Lower, reference, m), -half_sin * w);
        }
    }
    out
}
