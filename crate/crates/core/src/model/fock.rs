//! Explicit Fock-space construction over the eight modes, used as an
//! independent check of the closed-form expansions.
//!
//! States are built as polynomials in creation operators, the interferometer
//! substitutes each `a†_μ`, `b†_μ` by its image, and the expanded polynomial
//! is applied to the vacuum with `a†|n⟩ = √(n+1)|n+1⟩`.

use std::collections::BTreeMap;

use super::amplitudes::{lower_photon_weights, DoubleKey, TwoPhotonAmplitudes};
use super::{
    beam_splitter_matrix, InterferometerParams, ModeIndex, Path, Spatial, Spectral,
};

/// Largest photon number the oracle supports.
pub const MAX_PHOTONS: u8 = 3;

/// Occupation numbers indexed by [`ModeIndex::index`].
pub type Occupation = [u8; ModeIndex::COUNT];

/// Linear combination of normalised occupation-number states.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FockState {
    amplitudes: BTreeMap<Occupation, f64>,
}

impl FockState {
    pub fn vacuum() -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert([0; ModeIndex::COUNT], 1.0);
        Self { amplitudes }
    }

    /// Applies `a†_mode`.
    ///
    /// # Panics
    /// If a component would exceed [`MAX_PHOTONS`].
    pub fn create(&self, mode: ModeIndex) -> Self {
        let k = mode.index();
        let mut out = FockState::default();
        for (occ, amp) in &self.amplitudes {
            let total: u8 = occ.iter().sum();
            assert!(total < MAX_PHOTONS, "Fock oracle limited to {MAX_PHOTONS} photons");
            let mut next = *occ;
            next[k] += 1;
            out.add(next, amp * f64::from(next[k]).sqrt());
        }
        out
    }

    fn add(&mut self, occ: Occupation, amp: f64) {
        *self.amplitudes.entry(occ).or_insert(0.0) += amp;
    }

    pub fn amplitude(&self, occ: &Occupation) -> f64 {
        self.amplitudes.get(occ).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, f64)> {
        self.amplitudes.iter().map(|(o, a)| (o, *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a * a).sum()
    }

    /// Probability of finding `n` photons in the upper port, for `n = 0..=3`.
    pub fn upper_port_counts(&self) -> [f64; MAX_PHOTONS as usize + 1] {
        let mut out = [0.0; MAX_PHOTONS as usize + 1];
        for (occ, amp) in &self.amplitudes {
            let n: u8 = occ[..4].iter().sum();
            out[n as usize] += amp * amp;
        }
        out
    }
}

/// Polynomial in creation operators: `Σ coeff · Π a†_mode`.
#[derive(Debug, Clone, Default)]
pub struct CreationPolynomial {
    terms: Vec<(f64, Vec<ModeIndex>)>,
}

impl CreationPolynomial {
    pub fn one() -> Self {
        Self {
            terms: vec![(1.0, Vec::new())],
        }
    }

    pub fn linear(terms: impl IntoIterator<Item = (ModeIndex, f64)>) -> Self {
        Self {
            terms: terms.into_iter().map(|(m, c)| (c, vec![m])).collect(),
        }
    }

    pub fn scale(mut self, factor: f64) -> Self {
        for t in &mut self.terms {
            t.0 *= factor;
        }
        self
    }

    pub fn mul(&self, other: &CreationPolynomial) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, m1) in &self.terms {
            for (c2, m2) in &other.terms {
                let mut modes = m1.clone();
                modes.extend_from_slice(m2);
                terms.push((c1 * c2, modes));
            }
        }
        Self { terms }
    }

    /// Replaces every creation operator by its image under `map`.
    pub fn substitute<F>(&self, map: F) -> Self
    where
        F: Fn(ModeIndex) -> CreationPolynomial,
    {
        let mut out = CreationPolynomial::default();
        for (c, modes) in &self.terms {
            let mut product = CreationPolynomial::one().scale(*c);
            for &m in modes {
                product = product.mul(&map(m));
            }
            out.terms.extend(product.terms);
        }
        out
    }

    pub fn apply_to_vacuum(&self) -> FockState {
        let mut out = FockState::default();
        for (c, modes) in &self.terms {
            let mut state = FockState::vacuum();
            for &m in modes.iter().rev() {
                state = state.create(m);
            }
            for (occ, amp) in state.iter() {
                out.add(*occ, c * amp);
            }
        }
        out
    }
}

/// Image of a single creation operator under the interferometer.
pub fn transform_creation(theta: f64, mode: ModeIndex) -> CreationPolynomial {
    let m = beam_splitter_matrix(theta);
    let upper = ModeIndex {
        path: Path::Upper,
        local: mode.local,
    };
    let lower = upper.partner();
    // The matrix is symmetric, so rows and columns coincide.
    let row = match mode.path {
        Path::Upper => m[0],
        Path::Lower => m[1],
    };
    CreationPolynomial::linear([(upper, row[0]), (lower, row[1])])
}

fn reference_mode(path: Path) -> ModeIndex {
    ModeIndex::new(path, Spectral::One, Spatial::R)
}

fn lower_photon(params: &InterferometerParams) -> CreationPolynomial {
    CreationPolynomial::linear(lower_photon_weights(params).into_iter().map(|(local, w)| {
        (
            ModeIndex {
                path: Path::Lower,
                local,
            },
            w,
        )
    }))
}

/// Two-photon input: `a†₁R` times the lower-path single-photon creator.
pub fn two_photon_input(params: &InterferometerParams) -> CreationPolynomial {
    CreationPolynomial::linear([(reference_mode(Path::Upper), 1.0)]).mul(&lower_photon(params))
}

/// Three-photon input: `(a†₁R)²/√2` times the lower-path single-photon creator.
pub fn three_photon_input(params: &InterferometerParams) -> CreationPolynomial {
    let a = CreationPolynomial::linear([(reference_mode(Path::Upper), 1.0)]);
    a.mul(&a)
        .scale(std::f64::consts::FRAC_1_SQRT_2)
        .mul(&lower_photon(params))
}

pub fn output_state(input: &CreationPolynomial, theta: f64) -> FockState {
    input
        .substitute(|m| transform_creation(theta, m))
        .apply_to_vacuum()
}

/// Output amplitudes computed in the explicit Fock space.
pub fn brute_force_oracle(params: &InterferometerParams) -> TwoPhotonAmplitudes {
    let state = output_state(&two_photon_input(params), params.theta());
    let modes: Vec<ModeIndex> = ModeIndex::all().collect();
    let mut out = TwoPhotonAmplitudes::default();
    for (occ, amp) in state.iter() {
        let occupied: Vec<ModeIndex> = modes
            .iter()
            .flat_map(|m| std::iter::repeat_n(*m, occ[m.index()] as usize))
            .collect();
        let [x, y] = occupied[..] else {
            unreachable!("two-photon input keeps photon number");
        };
        if x.path == y.path {
            *out.double
                .entry(DoubleKey::new(x.path, x.local, y.local))
                .or_insert(0.0) += amp;
        } else {
            let (u, l) = if x.path == Path::Upper { (x, y) } else { (y, x) };
            *out.coincidence.entry((u.local, l.local)).or_insert(0.0) += amp;
        }
    }
    out
}

/// Probabilities of `(3,0), (2,1), (1,2), (0,3)` photons in (upper, lower) ports
/// for the three-photon input.
pub fn three_photon_port_counts(params: &InterferometerParams) -> [f64; 4] {
    let counts = output_state(&three_photon_input(params), params.theta()).upper_port_counts();
    [counts[3], counts[2], counts[1], counts[0]]
}
