//! Two photons in one input port and a single photon in the other.
//!
//! The pair occupies the spatial mode `u`, the single photon the displaced
//! mode `v`, and the single photon is spectrally indistinguishable from the
//! pair with probability `V`. Photon-number outcomes `(n, n′)` count photons
//! in the upper and lower output ports; `21` and `12` events are resolved in
//! position.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::fisher::{fisher_term, FisherKind, FisherReport};
use crate::model::fock::three_photon_port_counts;
use crate::model::InterferometerParams;
use crate::numeric::{golden_section_max, CompensatedSum};
use crate::quadrature::{refine, CompositeRule, Refinement};
use crate::spatial::{gaussian_amplitude, mode_profiles, overlap_from_geometry, SpatialModePair};

/// Integration window beyond the mode centres, in units of `σ`.
const WINDOW_MARGIN: f64 = 10.0;

/// Densities below this are treated as zero in the Fisher integrand.
const DENSITY_FLOOR: f64 = 1e-300;

/// Upper end of the displacement search, in units of `σ`.
pub const MAX_DISPLACEMENT: f64 = 6.0;

const DISPLACEMENT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreePhotonParams {
    theta: f64,
    visibility: f64,
    pair: SpatialModePair,
}

impl ThreePhotonParams {
    pub fn new(theta: f64, visibility: f64, pair: SpatialModePair) -> Result<Self> {
        InterferometerParams::new(theta, visibility, overlap_from_geometry(&pair))?;
        Ok(Self {
            theta,
            visibility,
            pair,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    pub fn pair(&self) -> &SpatialModePair {
        &self.pair
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(theta, self.visibility, self.pair)
    }

    /// Equivalent two-mode parameters with `D = |⟨u|v⟩|²`.
    pub fn interferometer(&self) -> InterferometerParams {
        InterferometerParams::new(self.theta, self.visibility, overlap_from_geometry(&self.pair))
            .expect("validated on construction")
    }

    fn coefficients(&self) -> Coefficients {
        Coefficients::new(self.theta)
    }
}

/// Photon-number distribution over the two output ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountDistribution {
    pub p30: f64,
    pub p21: f64,
    pub p12: f64,
    pub p03: f64,
}

impl CountDistribution {
    pub fn sum(&self) -> f64 {
        self.p30 + self.p21 + self.p12 + self.p03
    }
}

/// `θ`-dependent coefficients of the coherent amplitudes with their first and
/// second derivatives: `α = ½ sinθ sin(θ/2)`, `β = cos³(θ/2)` for `21` events
/// and `δ = ½ sinθ cos(θ/2)`, `γ = sin³(θ/2)` for `12` events.
#[derive(Debug, Clone, Copy)]
struct Coefficients {
    alpha: [f64; 3],
    beta: [f64; 3],
    delta: [f64; 3],
    gamma: [f64; 3],
}

impl Coefficients {
    fn new(theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        let (s, c) = (0.5 * theta).sin_cos();
        Self {
            alpha: [
                0.5 * sin * s,
                0.5 * cos * s + 0.25 * sin * c,
                -0.625 * sin * s + 0.5 * cos * c,
            ],
            beta: [c * c * c, -1.5 * c * c * s, 1.5 * c * s * s - 0.75 * c * c * c],
            delta: [
                0.5 * sin * c,
                0.5 * cos * c - 0.25 * sin * s,
                -0.625 * sin * c - 0.5 * cos * s,
            ],
            gamma: [s * s * s, 1.5 * s * s * c, 1.5 * s * c * c - 0.75 * s * s * s],
        }
    }
}

/// Both densities share the spatial factors
/// `S = (u₁v₂ + u₂v₁)u′`, `T = u₁u₂v′`, `Q = (u₁²v₂² + v₁²u₂²)u′²`
/// and read `V(aS − bT)² + (1 − V)(a²Q + b²T²)` with `(a, b) = (α, β)` for
/// `21` events and `(δ, γ)` for `12` events. Returns the density and its first
/// two `θ`-derivatives.
#[inline]
fn density_terms(a: &[f64; 3], b: &[f64; 3], v: f64, s: f64, t: f64, q: f64) -> [f64; 3] {
    let coh = a[0] * s - b[0] * t;
    let coh1 = a[1] * s - b[1] * t;
    let coh2 = a[2] * s - b[2] * t;
    let w = 1.0 - v;
    [
        v * coh * coh + w * (a[0] * a[0] * q + b[0] * b[0] * t * t),
        2.0 * v * coh * coh1 + 2.0 * w * (a[0] * a[1] * q + b[0] * b[1] * t * t),
        2.0 * v * (coh1 * coh1 + coh * coh2)
            + 2.0 * w * ((a[1] * a[1] + a[0] * a[2]) * q + (b[1] * b[1] + b[0] * b[2]) * t * t),
    ]
}

#[inline]
fn stq(u1: f64, v1: f64, u2: f64, v2: f64, up: f64, vp: f64) -> (f64, f64, f64) {
    let s = (u1 * v2 + u2 * v1) * up;
    let t = u1 * u2 * vp;
    let q = (u1 * u1 * v2 * v2 + v1 * v1 * u2 * u2) * up * up;
    (s, t, q)
}

/// Density of two upper-port photons at `x₁, x₂` and a lower-port photon at `x′`.
pub fn p21_density(x1: f64, x2: f64, x_prime: f64, params: &ThreePhotonParams) -> f64 {
    let m = mode_profiles(&params.pair);
    let (s, t, q) = stq(m.u(x1), m.v(x1), m.u(x2), m.v(x2), m.u(x_prime), m.v(x_prime));
    let c = params.coefficients();
    density_terms(&c.alpha, &c.beta, params.visibility, s, t, q)[0]
}

/// Density of an upper-port photon at `x` and two lower-port photons at `x₁′, x₂′`.
pub fn p12_density(x: f64, x1_prime: f64, x2_prime: f64, params: &ThreePhotonParams) -> f64 {
    let m = mode_profiles(&params.pair);
    let (s, t, q) = stq(
        m.u(x1_prime),
        m.v(x1_prime),
        m.u(x2_prime),
        m.v(x2_prime),
        m.u(x),
        m.v(x),
    );
    let c = params.coefficients();
    density_terms(&c.delta, &c.gamma, params.visibility, s, t, q)[0]
}

fn integrand_fisher(terms: [f64; 3]) -> f64 {
    let [p, dp, d2p] = terms;
    if p < DENSITY_FLOOR {
        (2.0 * d2p).max(0.0)
    } else {
        dp * dp / p
    }
}

/// Triple integrals `[∫p21, ∫p12, ∫p21′²/p21, ∫p12′²/p12]` on a tensor rule.
///
/// The integrands are symmetric in the two same-port coordinates, so only
/// `j ≤ i` is visited.
fn tensor_integrals(params: &ThreePhotonParams, rule: &CompositeRule) -> [f64; 4] {
    let d = params.pair.d_over_sigma();
    let u: Vec<f64> = rule.nodes.iter().map(|&x| gaussian_amplitude(x, -0.5 * d)).collect();
    let v: Vec<f64> = rule.nodes.iter().map(|&x| gaussian_amplitude(x, 0.5 * d)).collect();
    let w = &rule.weights;
    let c = params.coefficients();
    let vis = params.visibility;
    let n = rule.len();

    let rows: Vec<[f64; 4]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = [0.0; 4];
            for j in 0..=i {
                let mult = if i == j { 1.0 } else { 2.0 };
                let wij = mult * w[i] * w[j];
                let mut acc = [0.0; 4];
                for k in 0..n {
                    let (s, t, q) = stq(u[i], v[i], u[j], v[j], u[k], v[k]);
                    let t21 = density_terms(&c.alpha, &c.beta, vis, s, t, q);
                    let t12 = density_terms(&c.delta, &c.gamma, vis, s, t, q);
                    acc[0] += w[k] * t21[0];
                    acc[1] += w[k] * t12[0];
                    acc[2] += w[k] * integrand_fisher(t21);
                    acc[3] += w[k] * integrand_fisher(t12);
                }
                for (r, a) in row.iter_mut().zip(acc) {
                    *r += wij * a;
                }
            }
            row
        })
        .collect();
    let mut out = [0.0; 4];
    for (slot, q) in out.iter_mut().enumerate() {
        *q = rows.iter().map(|r| r[slot]).collect::<CompensatedSum>().value();
    }
    out
}

fn triple_refinement() -> Refinement {
    Refinement {
        rel_tol: 1e-7,
        abs_tol: 1e-13,
        initial_panels: 8,
        max_panels: 128,
    }
}

struct SpatialTerms {
    p21: f64,
    p12: f64,
    fisher21: f64,
    fisher12: f64,
    panels: usize,
}

fn spatial_terms(params: &ThreePhotonParams) -> Result<SpatialTerms> {
    let d = params.pair.d_over_sigma();
    let (lo, hi) = (-0.5 * d - WINDOW_MARGIN, 0.5 * d + WINDOW_MARGIN);
    let r = refine::<4, _>(lo, hi, triple_refinement(), |rule| tensor_integrals(params, rule))?;
    let [p21, p12, fisher21, fisher12] = r.value;
    Ok(SpatialTerms {
        p21,
        p12,
        fisher21,
        fisher12,
        panels: r.panels,
    })
}

/// `p30`, `p03` from the Fock-space evolution; `p21`, `p12` by integrating
/// the position-resolved densities.
pub fn three_photon_count_probabilities(params: &ThreePhotonParams) -> Result<CountDistribution> {
    let [p30, _, _, p03] = three_photon_port_counts(&params.interferometer());
    let spatial = spatial_terms(params)?;
    Ok(CountDistribution {
        p30,
        p21: spatial.p21,
        p12: spatial.p12,
        p03,
    })
}

/// `p30 = K cos⁴(θ/2) sin²(θ/2)`, `p03 = K sin⁴(θ/2) cos²(θ/2)`, `K = 1 + 2VD`,
/// each with its first and second `θ`-derivatives.
fn triple_port_terms(params: &InterferometerParams) -> ([f64; 3], [f64; 3]) {
    let k = 1.0 + 2.0 * params.visibility() * params.overlap();
    let (s, c) = (0.5 * params.theta()).sin_cos();
    let (s2, c2) = (s * s, c * c);
    let p30 = [
        k * c2 * c2 * s2,
        k * c2 * c * s * (c2 - 2.0 * s2),
        k * (0.5 * c2 * c2 * c2 - 5.5 * c2 * c2 * s2 + 3.0 * c2 * s2 * s2),
    ];
    let p03 = [
        k * s2 * s2 * c2,
        -k * s2 * s * c * (s2 - 2.0 * c2),
        k * (0.5 * s2 * s2 * s2 - 5.5 * s2 * s2 * c2 + 3.0 * s2 * c2 * c2),
    ];
    (p30, p03)
}

/// Breakdown of `F^(3)` into its four outcome classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreePhotonFisher {
    pub theta: f64,
    pub value: f64,
    pub term30: f64,
    pub term03: f64,
    pub term21: f64,
    pub term12: f64,
    pub panels: usize,
}

impl ThreePhotonFisher {
    pub fn report(&self) -> FisherReport {
        FisherReport {
            theta: self.theta,
            value: self.value,
            kind: FisherKind::ThreePhoton,
        }
    }

    /// `√(3/F^(3))`.
    pub fn epsilon(&self) -> f64 {
        self.report().epsilon()
    }
}

/// Fisher information of photon counting with position-resolved `21` and
/// `12` events. Zero-probability outcomes contribute their `θ`-limit.
pub fn fisher_three(params: &ThreePhotonParams) -> Result<ThreePhotonFisher> {
    let (p30, p03) = triple_port_terms(&params.interferometer());
    let spatial = spatial_terms(params)?;
    let term30 = fisher_term(p30[0], p30[1], p30[2]);
    let term03 = fisher_term(p03[0], p03[1], p03[2]);
    Ok(ThreePhotonFisher {
        theta: params.theta,
        value: term30 + term03 + spatial.fisher21 + spatial.fisher12,
        term30,
        term03,
        term21: spatial.fisher21,
        term12: spatial.fisher12,
        panels: spatial.panels,
    })
}

/// `θ0 = 2 arctan(1/√2)`, where the `21` coherent amplitude vanishes for
/// overlapping modes.
pub fn singular_phase() -> f64 {
    2.0 * (1.0 / 2f64.sqrt()).atan()
}

/// Displacement maximising `F^(3)(θ0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplacementOptimum {
    pub theta0: f64,
    pub visibility: f64,
    pub d_over_sigma: f64,
    pub fisher: f64,
    pub fisher_at_zero: f64,
}

/// Golden-section search for the displacement in `[0, 6σ]` maximising
/// `F^(3)(θ0)`; never worse than `d = 0`.
pub fn optimize_displacement(visibility: f64, theta0: f64) -> Result<DisplacementOptimum> {
    check_unit_interval("visibility", visibility)?;
    if visibility <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "visibility",
            value: visibility,
            reason: "must be positive",
        });
    }
    let eval = |d: f64| -> Result<f64> {
        let pair = SpatialModePair::from_ratio(d)?;
        Ok(fisher_three(&ThreePhotonParams::new(theta0, visibility, pair)?)?.value)
    };
    let fisher_at_zero = eval(0.0)?;
    let mut failure = None;
    let (d, f) = golden_section_max(
        |d| match eval(d) {
            Ok(f) => f,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        0.0,
        MAX_DISPLACEMENT,
        DISPLACEMENT_TOL,
    );
    if let Some(e) = failure {
        return Err(Error::NonConvergence(format!("F^(3) evaluation failed: {e}")));
    }
    let (d, f) = if f >= fisher_at_zero {
        (d, f)
    } else {
        (0.0, fisher_at_zero)
    };
    Ok(DisplacementOptimum {
        theta0,
        visibility,
        d_over_sigma: d,
        fisher: f,
        fisher_at_zero,
    })
}

/// One row of a three-photon sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreePhotonPoint {
    pub theta: f64,
    pub d_over_sigma: f64,
    pub counts: CountDistribution,
    pub fisher: f64,
    pub epsilon: f64,
}

fn point(params: &ThreePhotonParams) -> Result<ThreePhotonPoint> {
    let fisher = fisher_three(params)?;
    Ok(ThreePhotonPoint {
        theta: params.theta,
        d_over_sigma: params.pair.d_over_sigma(),
        counts: three_photon_count_probabilities(params)?,
        fisher: fisher.value,
        epsilon: fisher.epsilon(),
    })
}

/// Count fringes and `F^(3)` over `thetas` at a fixed displacement.
pub fn three_photon_sweep(
    thetas: &[f64],
    visibility: f64,
    pair: SpatialModePair,
) -> Result<Vec<ThreePhotonPoint>> {
    thetas
        .iter()
        .map(|&t| point(&ThreePhotonParams::new(t, visibility, pair)?))
        .collect()
}

/// As [`three_photon_sweep`], with the displacement optimised separately at
/// every phase.
pub fn three_photon_sweep_optimised(thetas: &[f64], visibility: f64) -> Result<Vec<ThreePhotonPoint>> {
    thetas
        .iter()
        .map(|&t| {
            let opt = optimize_displacement(visibility, t)?;
            let pair = SpatialModePair::from_ratio(opt.d_over_sigma)?;
            point(&ThreePhotonParams::new(t, visibility, pair)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linspace;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn params(theta: f64, v: f64, d: f64) -> ThreePhotonParams {
        ThreePhotonParams::new(theta, v, SpatialModePair::from_ratio(d).unwrap()).unwrap()
    }

    /// Integrals of the densities in closed form, using ∫uv = √D.
    fn closed_form(theta: f64, v: f64, d: f64) -> [f64; 2] {
        let (s, c) = (0.5 * theta).sin_cos();
        let vd = v * (-0.25 * d * d).exp();
        let (s2, c2) = (s * s, c * c);
        [
            c2 * c2 * c2 + 2.0 * s2 * s2 * c2 + vd * (2.0 * s2 * s2 * c2 - 4.0 * s2 * c2 * c2),
            s2 * s2 * s2 + 2.0 * c2 * c2 * s2 + vd * (2.0 * c2 * c2 * s2 - 4.0 * c2 * s2 * s2),
        ]
    }

    #[test]
    fn balanced_indistinguishable_counts() {
        let c = three_photon_count_probabilities(&params(FRAC_PI_2, 1.0, 0.0)).unwrap();
        for (got, want) in [(c.p30, 0.375), (c.p21, 0.125), (c.p12, 0.125), (c.p03, 0.375)] {
            assert!((got - want).abs() < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn identity_phase_keeps_input() {
        let c = three_photon_count_probabilities(&params(0.0, 0.6, 1.3)).unwrap();
        assert!((c.p21 - 1.0).abs() < 1e-10 && c.p30.abs() < 1e-15 && c.p12.abs() < 1e-15);
    }

    #[test]
    fn normalisation_and_closed_forms() {
        for &(t, v, d) in &[(0.4, 0.93, 0.0), (1.1, 0.5, 1.45), (2.5, 0.0, 2.0), (1.9, 1.0, 0.7)] {
            let p = params(t, v, d);
            let c = three_photon_count_probabilities(&p).unwrap();
            assert!((c.sum() - 1.0).abs() < 1e-10, "{c:?}");
            let [p21, p12] = closed_form(t, v, d);
            assert!((c.p21 - p21).abs() < 1e-8 && (c.p12 - p12).abs() < 1e-8);
            let oracle = three_photon_port_counts(&p.interferometer());
            let (k30, k03) = triple_port_terms(&p.interferometer());
            assert!((oracle[0] - k30[0]).abs() < 1e-12 && (oracle[3] - k03[0]).abs() < 1e-12);
            if d == 0.0 {
                assert!((oracle[1] - c.p21).abs() < 1e-8 && (oracle[2] - c.p12).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn exchange_symmetry_and_dark_phase() {
        let p = params(1.2, 0.8, 1.1);
        assert_eq!(p21_density(0.3, -0.9, 0.4, &p), p21_density(-0.9, 0.3, 0.4, &p));
        assert_eq!(p12_density(0.4, 0.3, -0.9, &p), p12_density(0.4, -0.9, 0.3, &p));
        let p = params(PI, 0.8, 1.1);
        for x in [-1.0, 0.0, 0.7] {
            assert!(p21_density(x, 0.5 * x, -x, &p).abs() < 1e-30);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        let c0 = Coefficients::new(1.0);
        let cp = Coefficients::new(1.0 + h);
        let cm = Coefficients::new(1.0 - h);
        let pick = |c: &Coefficients| [c.alpha, c.beta, c.delta, c.gamma];
        for (k, ((mid, plus), minus)) in pick(&c0).iter().zip(pick(&cp)).zip(pick(&cm)).enumerate() {
            for i in 0..2 {
                let fd = (plus[i] - minus[i]) / (2.0 * h);
                assert!((fd - mid[i + 1]).abs() < 1e-7, "coefficient {k}, order {i}");
            }
        }
        let p = |t: f64| triple_port_terms(&InterferometerParams::new(t, 0.7, 0.4).unwrap());
        let (a, b) = p(1.0);
        let (ap, bp) = p(1.0 + h);
        let (am, bm) = p(1.0 - h);
        for (c, pl, mi) in [(a, ap, am), (b, bp, bm)] {
            assert!(((pl[0] - mi[0]) / (2.0 * h) - c[1]).abs() < 1e-7);
            assert!(((pl[1] - mi[1]) / (2.0 * h) - c[2]).abs() < 1e-7);
        }
    }

    #[test]
    fn seven_for_indistinguishable_photons() {
        for t in linspace(0.0, PI, 7) {
            let f = fisher_three(&params(t, 1.0, 0.0)).unwrap();
            assert!((f.value - 7.0).abs() < 1e-6, "θ = {t}: {f:?}");
        }
    }

    #[test]
    fn singular_point_dip() {
        let t0 = singular_phase();
        let f = |t| fisher_three(&params(t, 0.93, 0.0)).unwrap();
        let centre = f(t0);
        assert!(centre.epsilon() > 1.0, "{centre:?}");
        assert!(centre.value < f(t0 - 0.05).value && centre.value < f(t0 + 0.05).value);
        let mirror = fisher_three(&params(PI - t0, 0.93, 0.0)).unwrap();
        assert!((mirror.value - centre.value).abs() < 1e-8);
    }
}
