//! Gaussian spatial modes and spatially resolved coincidence statistics.
//!
//! Positions are measured in units of the mode width `σ` throughout; a
//! [`SpatialModePair`] keeps the physical `σ` only for input and output.
//! Densities are per unit of `x/σ`.
//!
//! The upper-path photon occupies the profile centred at `+d/2` and the
//! lower-path photon the one centred at `−d/2`, so the coincidence term
//! weighted by `cos⁴(θ/2)` peaks at `ξ = x − x′ = +d`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::{fisher_term, FisherKind, FisherReport};
use crate::model::{
    double_probability, double_probability_derivative, double_probability_second_derivative,
    InterferometerParams,
};
use crate::quadrature::{integrate, refine, Refinement};
use crate::trig::PhaseTrig;

/// Densities below this are treated as exact zeros of the Fisher integrand.
const DENSITY_FLOOR: f64 = 1e-300;

/// Half-width of the `ξ` integration window beyond `±d`, in units of `σ`.
const XI_MARGIN: f64 = 10.0 * std::f64::consts::SQRT_2;

/// Two Gaussian modes of width `σ` displaced by `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpatialModePair {
    sigma: f64,
    displacement: f64,
}

impl SpatialModePair {
    pub fn new(sigma: f64, displacement: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: sigma,
                reason: "must be positive and finite",
            });
        }
        if !(displacement.is_finite() && displacement >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "displacement",
                value: displacement,
                reason: "must be nonnegative and finite",
            });
        }
        Ok(Self {
            sigma,
            displacement,
        })
    }

    /// Pair with `σ = 1`, so that the displacement is `d/σ`.
    pub fn from_ratio(d_over_sigma: f64) -> Result<Self> {
        Self::new(1.0, d_over_sigma)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn displacement(&self) -> f64 {
        self.displacement
    }

    pub fn d_over_sigma(&self) -> f64 {
        self.displacement / self.sigma
    }

    /// Symmetric `ξ/σ` window that holds all but a negligible tail of the
    /// relative-position density.
    pub fn xi_window(&self) -> (f64, f64) {
        let half = self.d_over_sigma() + XI_MARGIN;
        (-half, half)
    }
}

/// Normalised Gaussian amplitude `(2π)^(−1/4) exp(−(x − μ)²/4)`.
#[inline]
pub(crate) fn gaussian_amplitude(x: f64, centre: f64) -> f64 {
    let z = x - centre;
    (2.0 * PI).powf(-0.25) * (-0.25 * z * z).exp()
}

/// The profiles `u(x) = (2π)^(−1/4) e^{−(x+d/2)²/4}` and `v(x) = u(x − d)`.
#[derive(Debug, Clone, Copy)]
pub struct ModeProfiles {
    d: f64,
}

impl ModeProfiles {
    pub fn u(&self, x: f64) -> f64 {
        gaussian_amplitude(x, -0.5 * self.d)
    }

    pub fn v(&self, x: f64) -> f64 {
        gaussian_amplitude(x, 0.5 * self.d)
    }
}

pub fn mode_profiles(pair: &SpatialModePair) -> ModeProfiles {
    ModeProfiles {
        d: pair.d_over_sigma(),
    }
}

/// `D = |∫u v|² = exp(−d²/4σ²)`.
pub fn overlap_from_geometry(pair: &SpatialModePair) -> f64 {
    let d = pair.d_over_sigma();
    (-0.25 * d * d).exp()
}

/// Interferometer operating point together with a spatial mode pair.
#[derive(Debug, Clone, Copy)]
pub struct SpatialModel {
    params: InterferometerParams,
    pair: SpatialModePair,
    trig: PhaseTrig,
    d: f64,
}

impl SpatialModel {
    pub fn new(theta: f64, visibility: f64, pair: SpatialModePair) -> Result<Self> {
        let params = InterferometerParams::new(theta, visibility, overlap_from_geometry(&pair))?;
        Ok(Self {
            params,
            pair,
            trig: PhaseTrig::new(theta),
            d: pair.d_over_sigma(),
        })
    }

    /// Interferometer parameters with `D` fixed by the geometry.
    pub fn params(&self) -> &InterferometerParams {
        &self.params
    }

    pub fn pair(&self) -> &SpatialModePair {
        &self.pair
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(theta, self.params.visibility(), self.pair)
    }

    /// Joint density of an upper-port photon at `x` and a lower-port photon at `x′`.
    pub fn joint_density(&self, x: f64, xp: f64) -> f64 {
        let (c2, s2) = (self.c2(), self.s2());
        let v = self.params.visibility();
        let (ax, bx) = self.profiles_at(x);
        let (axp, bxp) = self.profiles_at(xp);
        let coherent = c2 * ax * bxp - s2 * bx * axp;
        let direct = c2 * ax * bxp;
        let exchanged = s2 * bx * axp;
        v * coherent * coherent + (1.0 - v) * (direct * direct + exchanged * exchanged)
    }

    /// Upper-path (`+d/2`) and lower-path (`−d/2`) amplitudes at `x`.
    #[inline]
    pub(crate) fn profiles_at(&self, x: f64) -> (f64, f64) {
        (
            gaussian_amplitude(x, 0.5 * self.d),
            gaussian_amplitude(x, -0.5 * self.d),
        )
    }

    fn c2(&self) -> f64 {
        self.trig.cos_half * self.trig.cos_half
    }

    fn s2(&self) -> f64 {
        self.trig.sin_half * self.trig.sin_half
    }

    /// Gaussian factors `√t₁ = e^{−(ξ−d)²/8}`, `√t₂ = e^{−(ξ+d)²/8}`, `t₃ = e^{−(ξ²+d²)/4}`.
    #[inline]
    fn xi_factors(&self, xi: f64) -> (f64, f64, f64) {
        let d = self.d;
        let r1 = (-(xi - d) * (xi - d) / 8.0).exp();
        let r2 = (-(xi + d) * (xi + d) / 8.0).exp();
        (r1, r2, r1 * r2)
    }

    /// Density of the relative position `ξ = x − x′` of coincidence pairs.
    pub fn relative_density(&self, xi: f64) -> f64 {
        let (c2, s2) = (self.c2(), self.s2());
        let v = self.params.visibility();
        let (r1, r2, t3) = self.xi_factors(xi);
        let diff = c2 * r1 - s2 * r2;
        (diff * diff + 2.0 * c2 * s2 * (1.0 - v) * t3) / (2.0 * PI.sqrt())
    }

    /// `∂p_c(ξ|θ)/∂θ`.
    pub fn relative_density_derivative(&self, xi: f64) -> f64 {
        let t = &self.trig;
        let (c, s) = (t.cos_half, t.sin_half);
        let v = self.params.visibility();
        let (r1, r2, t3) = self.xi_factors(xi);
        (-2.0 * c * c * c * s * r1 * r1 + 2.0 * s * s * s * c * r2 * r2 - v * t.sin * t.cos * t3)
            / (2.0 * PI.sqrt())
    }

    /// `∂²p_c(ξ|θ)/∂θ²`.
    pub fn relative_density_second_derivative(&self, xi: f64) -> f64 {
        let t = &self.trig;
        let (c2, s2) = (self.c2(), self.s2());
        let v = self.params.visibility();
        let (r1, r2, t3) = self.xi_factors(xi);
        let cos2 = t.cos * t.cos - t.sin * t.sin;
        ((3.0 * c2 * s2 - c2 * c2) * r1 * r1 + (3.0 * s2 * c2 - s2 * s2) * r2 * r2
            - v * cos2 * t3)
            / (2.0 * PI.sqrt())
    }

    /// `∂p_c(ξ|θ)/∂V`.
    pub fn relative_density_visibility_derivative(&self, xi: f64) -> f64 {
        let (_, _, t3) = self.xi_factors(xi);
        -2.0 * self.c2() * self.s2() * t3 / (2.0 * PI.sqrt())
    }

    /// Fisher integrand `(∂p/∂θ)²/p`, with the `θ`-limit `2∂²p/∂θ²` where `p` vanishes.
    pub fn fisher_integrand(&self, xi: f64) -> f64 {
        let p = self.relative_density(xi);
        if p < DENSITY_FLOOR {
            (2.0 * self.relative_density_second_derivative(xi)).max(0.0)
        } else {
            let dp = self.relative_density_derivative(xi);
            dp * dp / p
        }
    }
}

pub fn joint_coincidence_density(x: f64, xp: f64, model: &SpatialModel) -> f64 {
    model.joint_density(x, xp)
}

pub fn marginal_relative_density(xi: f64, model: &SpatialModel) -> f64 {
    model.relative_density(xi)
}

/// Relative-position density by numerical marginalisation of the joint density.
pub fn marginalise_joint(xi: f64, model: &SpatialModel, control: Refinement) -> Result<f64> {
    let half = 0.5 * model.d + XI_MARGIN;
    let centre = -0.5 * xi;
    integrate(
        |xp| model.joint_density(xp + xi, xp),
        centre - half,
        centre + half,
        control,
    )
}

/// Spatially resolved Fisher information split into its two event classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpatialFisher {
    pub theta: f64,
    /// Integral over `ξ` of the coincidence term.
    pub coincidence: f64,
    /// Unresolved double-event term.
    pub double: f64,
    pub total: f64,
    pub panels: usize,
}

impl SpatialFisher {
    pub fn report(&self) -> FisherReport {
        FisherReport {
            theta: self.theta,
            value: self.total,
            kind: FisherKind::Spatial,
        }
    }
}

/// Quadrature controls for `ξ` integrals.
pub fn xi_refinement() -> Refinement {
    Refinement {
        rel_tol: 1e-9,
        abs_tol: 1e-14,
        initial_panels: 16,
        max_panels: 1 << 20,
    }
}

pub fn spatial_fisher(model: &SpatialModel) -> Result<SpatialFisher> {
    let (lo, hi) = model.pair.xi_window();
    let integral = refine::<1, _>(lo, hi, xi_refinement(), |rule| {
        let mut acc = crate::numeric::CompensatedSum::new();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            acc.add(w * model.fisher_integrand(*x));
        }
        [acc.value()]
    })?;
    let p = &model.params;
    let double = fisher_term(
        double_probability(p),
        double_probability_derivative(p),
        double_probability_second_derivative(p),
    );
    Ok(SpatialFisher {
        theta: p.theta(),
        coincidence: integral.value[0],
        double,
        total: integral.value[0] + double,
        panels: integral.panels,
    })
}

/// `∫ p_c(ξ|θ) dξ`.
pub fn total_coincidence_probability(model: &SpatialModel) -> Result<f64> {
    let (lo, hi) = model.pair.xi_window();
    integrate(|xi| model.relative_density(xi), lo, hi, xi_refinement())
}
