use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use serde::Serialize;

use super::InterferometerParams;

/// Spatial state of a coincidence pair: (upper-port photon, lower-port photon).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SpatialPair {
    RR,
    RL,
    LR,
    LL,
}

impl SpatialPair {
    pub const ALL: [SpatialPair; 4] = [
        SpatialPair::RR,
        SpatialPair::RL,
        SpatialPair::LR,
        SpatialPair::LL,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Spatial density matrix of coincidence events after tracing out the
/// spectral degree of freedom, in the basis `(RR, RL, LR, LL)`.
///
/// Unnormalised: the trace is the coincidence probability. All entries are
/// real for the sign convention of the beam splitter, so the matrix is stored
/// as real symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalDensityMatrix {
    entries: Matrix4<f64>,
}

impl ConditionalDensityMatrix {
    pub(crate) fn from_matrix(entries: Matrix4<f64>) -> Self {
        Self { entries }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.entries
    }

    pub fn entry(&self, row: SpatialPair, col: SpatialPair) -> f64 {
        self.entries[(row.index(), col.index())]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// `⟨ψ|ϱ|ψ⟩` for a real spatial vector.
    pub fn expectation(&self, v: &Vector4<f64>) -> f64 {
        v.dot(&(self.entries * v))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.entries);
        let mut values: [f64; 4] = eig.eigenvalues.into();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn max_abs_diff(&self, other: &ConditionalDensityMatrix) -> f64 {
        (self.entries - other.entries).abs().max()
    }
}

/// Closed-form conditional density matrix of coincidence events.
pub fn conditional_density_matrix(params: &InterferometerParams) -> ConditionalDensityMatrix {
    build(params, 0)
}

/// Element-wise `θ`-derivative of [`conditional_density_matrix`].
pub fn conditional_density_matrix_derivative(
    params: &InterferometerParams,
) -> ConditionalDensityMatrix {
    build(params, 1)
}

/// Element-wise second `θ`-derivative of [`conditional_density_matrix`].
pub fn conditional_density_matrix_second_derivative(
    params: &InterferometerParams,
) -> ConditionalDensityMatrix {
    build(params, 2)
}

fn build(params: &InterferometerParams, order: u8) -> ConditionalDensityMatrix {
    let t = params.trig();
    let d = params.overlap();
    let v = params.visibility();
    let (c, s) = (t.cos_half, t.sin_half);
    let (c2, s2) = (c * c, s * s);

    // rr = 1 − ½(1+V) sin²θ, c4 = cos⁴(θ/2), s4 = sin⁴(θ/2), q = ¼ V sin²θ
    let (rr, c4, s4, q) = match order {
        0 => {
            let sin2 = t.sin * t.sin;
            (1.0 - 0.5 * (1.0 + v) * sin2, c2 * c2, s2 * s2, 0.25 * v * sin2)
        }
        1 => {
            let sd = t.sin_double();
            (-0.5 * (1.0 + v) * sd, -2.0 * c2 * c * s, 2.0 * s2 * s * c, 0.25 * v * sd)
        }
        _ => {
            let cd = t.cos * t.cos - t.sin * t.sin;
            (
                -(1.0 + v) * cd,
                3.0 * c2 * s2 - c2 * c2,
                3.0 * s2 * c2 - s2 * s2,
                0.5 * v * cd,
            )
        }
    };

    let mixed = (d * (1.0 - d)).sqrt();
    let l = 1.0 - d;
    let m = Matrix4::new(
        d * rr,
        mixed * (c4 - q),
        mixed * (s4 - q),
        0.0,
        mixed * (c4 - q),
        l * c4,
        -l * q,
        0.0,
        mixed * (s4 - q),
        -l * q,
        l * s4,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    );
    ConditionalDensityMatrix::from_matrix(m)
}
