//! Fisher information of the coincidence/double statistics, of the R/L-resolved
//! measurement and of the optimal spatial measurement, together with the
//! symmetric logarithmic derivative that defines the latter.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::model::{
    coincidence_probability, conditional_density_matrix, conditional_density_matrix_derivative,
    conditional_density_matrix_second_derivative, double_probability,
    double_probability_derivative, double_probability_second_derivative, InterferometerParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FisherKind {
    Pairwise,
    RlResolved,
    Quantum,
    Spatial,
    OptimalBasis,
    /// Two photons in one input port and one in the other.
    ThreePhoton,
}

impl FisherKind {
    /// Photons per probe state, which sets the shot-noise reference.
    pub fn photons(self) -> u32 {
        match self {
            FisherKind::ThreePhoton => 3,
            _ => 2,
        }
    }
}

/// Fisher information per probe state at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherReport {
    pub theta: f64,
    pub value: f64,
    pub kind: FisherKind,
}

impl FisherReport {
    /// `√(n/F)` for `n` photons per probe state.
    pub fn epsilon(&self) -> f64 {
        epsilon_for(self.value, self.kind.photons())
    }
}

/// Ratio of the pair Cramér–Rao bound to the shot-noise limit, `√(2/F)`;
/// infinite when `F = 0`.
pub fn epsilon(fisher: f64) -> f64 {
    epsilon_for(fisher, 2)
}

/// `√(photons/F)`, the bound relative to `photons` independent photons.
pub fn epsilon_for(fisher: f64, photons: u32) -> f64 {
    if fisher > 0.0 {
        (photons as f64 / fisher).sqrt()
    } else {
        f64::INFINITY
    }
}

/// One outcome's contribution `p′²/p`.
///
/// When `p` and `p′` both vanish the contribution is the limit `2p″` along
/// `θ`, which keeps the Fisher information continuous across zeros of a fringe.
pub(crate) fn fisher_term(p: f64, dp: f64, d2p: f64) -> f64 {
    if p > 0.0 {
        dp * dp / p
    } else if dp == 0.0 {
        (2.0 * d2p).max(0.0)
    } else {
        f64::INFINITY
    }
}

/// Fisher information of coincidences vs doubles without spatial resolution.
pub fn classical_fisher(params: &InterferometerParams) -> FisherReport {
    let t = params.trig();
    let k = 0.5 * (1.0 + params.overlap() * params.visibility());
    let (s2, c2) = (t.sin * t.sin, t.cos * t.cos);
    // p_d′²/p_d = 4k cos²θ; p_c′²/p_c = 4k² sin²θ · r
    let denom = c2 + (1.0 - k) * s2;
    let r = if denom > 0.0 { c2 / denom } else { 1.0 };
    FisherReport {
        theta: params.theta(),
        value: 4.0 * k * k * s2 * r + 4.0 * k * c2,
        kind: FisherKind::Pairwise,
    }
}

/// Fisher information with coincidences resolved into `RR, RL, LR, LL`.
pub fn fisher_rl(params: &InterferometerParams) -> FisherReport {
    let t = params.trig();
    let (d, v) = (params.overlap(), params.visibility());
    let (s2, c2) = (t.sin * t.sin, t.cos * t.cos);
    let value = if c2 == 0.0 {
        // At V = 1 the ratio is 2(1+D) for every θ, so that is its dark-fringe limit.
        if v < 1.0 {
            2.0 * (1.0 - d)
        } else {
            2.0 * (1.0 + d)
        }
    } else {
        let num = 2.0 * (1.0 + d * v) * c2 + (1.0 - d) * (1.0 - v) * s2;
        let den = c2 + 0.5 * (1.0 - v) * s2;
        num / den
    };
    FisherReport {
        theta: params.theta(),
        value,
        kind: FisherKind::RlResolved,
    }
}

/// Quantum Fisher information of coincidences (spatially optimal
/// measurement) plus doubles (unresolved).
pub fn quantum_fisher(params: &InterferometerParams) -> FisherReport {
    FisherReport {
        theta: params.theta(),
        value: quantum_fisher_value(params.theta(), params.visibility(), params.overlap()),
        kind: FisherKind::Quantum,
    }
}

fn quantum_fisher_value(theta: f64, v: f64, d: f64) -> f64 {
    let t = crate::trig::PhaseTrig::new(theta);
    let dv = d * v;
    if (1.0 - dv).abs() < 1e-12 {
        return 2.0 * (1.0 + dv);
    }
    let (s2, c2) = (t.sin * t.sin, t.cos * t.cos);
    let num = 1.0 - d * d + (1.0 + dv) * (1.0 + dv) * c2;
    let den = 1.0 - dv + (1.0 + dv) * c2;
    2.0 * num / den * s2 + 2.0 * (1.0 + dv) * c2
}

/// `∂F_Q/∂D` at fixed `θ`, `V`.
fn quantum_fisher_overlap_derivative(theta: f64, v: f64, d: f64) -> f64 {
    let t = crate::trig::PhaseTrig::new(theta);
    let dv = d * v;
    let (s2, c2) = (t.sin * t.sin, t.cos * t.cos);
    let num = 1.0 - d * d + (1.0 + dv) * (1.0 + dv) * c2;
    let den = 1.0 - dv + (1.0 + dv) * c2;
    let dnum = -2.0 * d + 2.0 * v * (1.0 + dv) * c2;
    let dden = -v + v * c2;
    2.0 * s2 * (dnum * den - num * dden) / (den * den) + 2.0 * v * c2
}

/// Overlap maximising the dark-fringe quantum Fisher information,
/// `(1 − √(1 − V²))/V`.
pub fn optimal_overlap(visibility: f64) -> Result<f64> {
    let v = check_unit_interval("visibility", visibility)?;
    if v == 0.0 {
        return Ok(0.0);
    }
    // Rationalised form avoids cancellation for small V.
    Ok(v / (1.0 + (1.0 - v * v).sqrt()))
}

/// Overlap maximising `F_Q(θ)` at fixed `V`, with the maximal value.
///
/// `F_Q` is unimodal in `D`, so bisection on the sign of the analytic
/// derivative locates the maximum to machine precision.
pub fn optimise_overlap(theta: f64, visibility: f64) -> Result<(f64, f64)> {
    let p = InterferometerParams::new(theta, visibility, 0.0)?;
    let (theta, v) = (p.theta(), p.visibility());
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if quantum_fisher_overlap_derivative(theta, v, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut best = (0.5 * (lo + hi), quantum_fisher_value(theta, v, 0.5 * (lo + hi)));
    for d in [0.0, 1.0] {
        let f = quantum_fisher_value(theta, v, d);
        if f > best.1 {
            best = (d, f);
        }
    }
    Ok(best)
}

/// Real unit vector over the spatial basis `(RR, RL, LR, LL)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpatialBasisVector {
    pub coefficients: [f64; 4],
}

impl SpatialBasisVector {
    fn from_vector(v: Vector4<f64>) -> Self {
        Self {
            coefficients: v.into(),
        }
    }

    pub fn vector(&self) -> Vector4<f64> {
        Vector4::from(self.coefficients)
    }

    pub fn norm(&self) -> f64 {
        self.vector().norm()
    }

    pub fn dot(&self, other: &SpatialBasisVector) -> f64 {
        self.vector().dot(&other.vector())
    }
}

/// The `α, β, γ` basis adapted to overlap `D`; `|LL⟩` completes it.
pub fn alpha_beta_gamma(overlap: f64) -> [SpatialBasisVector; 3] {
    let d = overlap;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a_rr = (2.0 * d / (1.0 + d)).sqrt();
    let a_mix = ((1.0 - d) / (2.0 * (1.0 + d))).sqrt();
    let g_rr = ((1.0 - d) / (1.0 + d)).sqrt();
    let g_mix = (d / (1.0 + d)).sqrt();
    [
        SpatialBasisVector::from_vector(Vector4::new(a_rr, a_mix, a_mix, 0.0)),
        SpatialBasisVector::from_vector(Vector4::new(0.0, h, -h, 0.0)),
        SpatialBasisVector::from_vector(Vector4::new(g_rr, -g_mix, -g_mix, 0.0)),
    ]
}

/// Eigenvectors `|±⟩ = (|α⟩ ± |β⟩)/√2` of the dark-fringe SLD.
pub fn optimal_basis(overlap: f64) -> Result<(SpatialBasisVector, SpatialBasisVector)> {
    let d = check_unit_interval("overlap", overlap)?;
    let [alpha, beta, _] = alpha_beta_gamma(d);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ok((
        SpatialBasisVector::from_vector((alpha.vector() + beta.vector()) * h),
        SpatialBasisVector::from_vector((alpha.vector() - beta.vector()) * h),
    ))
}

/// Symmetric logarithmic derivative of the coincidence state, supported on
/// `span{α, β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SldOperator {
    /// Matrix in the `(α, β)` basis.
    pub matrix: Matrix2<f64>,
    pub alpha: SpatialBasisVector,
    pub beta: SpatialBasisVector,
}

impl SldOperator {
    /// Embedding in the `(RR, RL, LR, LL)` basis.
    pub fn full(&self) -> Matrix4<f64> {
        let b = basis_matrix(&self.alpha, &self.beta);
        b * self.matrix * b.transpose()
    }

    /// Largest entry of `dϱ − ½(Lϱ + ϱL)` for a given state derivative.
    pub fn residual(&self, rho: &Matrix4<f64>, drho: &Matrix4<f64>) -> f64 {
        let l = self.full();
        (drho - 0.5 * (l * rho + rho * l)).abs().max()
    }

    /// `Tr(ϱ L²)`.
    pub fn coincidence_fisher(&self, rho: &Matrix4<f64>) -> f64 {
        let l = self.full();
        (rho * l * l).trace()
    }
}

fn basis_matrix(
    alpha: &SpatialBasisVector,
    beta: &SpatialBasisVector,
) -> nalgebra::Matrix4x2<f64> {
    nalgebra::Matrix4x2::from_columns(&[alpha.vector(), beta.vector()])
}

/// Solves `dϱ/dθ = ½(Lϱ + ϱL)` on `span{α, β}` in the eigenbasis of `ϱ`.
pub fn sld(params: &InterferometerParams) -> Result<SldOperator> {
    let [alpha, beta, _] = alpha_beta_gamma(params.overlap());
    let b = basis_matrix(&alpha, &beta);
    let rho = b.transpose() * conditional_density_matrix(params).matrix() * b;
    let drho = b.transpose() * conditional_density_matrix_derivative(params).matrix() * b;

    let eig = SymmetricEigen::new(rho);
    let u = eig.eigenvectors;
    let d_eig = u.transpose() * drho * u;
    let mut l_eig = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let denom = eig.eigenvalues[i] + eig.eigenvalues[j];
            if denom < 1e-14 {
                if d_eig[(i, j)].abs() > 1e-12 {
                    return Err(Error::RankDeficient {
                        derivative: d_eig[(i, j)],
                    });
                }
            } else {
                l_eig[(i, j)] = 2.0 * d_eig[(i, j)] / denom;
            }
        }
    }
    Ok(SldOperator {
        matrix: u * l_eig * u.transpose(),
        alpha,
        beta,
    })
}

/// Quantum Fisher information assembled from the SLD and the double-event
/// term; an independent route to [`quantum_fisher`].
pub fn quantum_fisher_from_sld(params: &InterferometerParams) -> Result<f64> {
    let l = sld(params)?;
    let rho = conditional_density_matrix(params);
    Ok(l.coincidence_fisher(rho.matrix())
        + fisher_term(
            double_probability(params),
            double_probability_derivative(params),
            double_probability_second_derivative(params),
        ))
}

/// Fringes of the measurement `{|+⟩, |−⟩, double}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalFringes {
    pub theta: f64,
    pub coincidence_plus: f64,
    pub coincidence_minus: f64,
    pub double: f64,
    /// Coincidence weight outside `span{|+⟩, |−⟩}`.
    pub residual: f64,
}

/// Fringes for projections onto the `|±⟩` basis adapted to the state's own overlap.
pub fn optimal_fringes(params: &InterferometerParams) -> OptimalFringes {
    let (plus, minus) = optimal_basis(params.overlap()).expect("overlap validated");
    let rho = conditional_density_matrix(params);
    let p_plus = rho.expectation(&plus.vector());
    let p_minus = rho.expectation(&minus.vector());
    OptimalFringes {
        theta: params.theta(),
        coincidence_plus: p_plus,
        coincidence_minus: p_minus,
        double: double_probability(params),
        residual: coincidence_probability(params) - p_plus - p_minus,
    }
}

/// Classical Fisher information of the `{|+⟩, |−⟩, double}` measurement.
pub fn optimal_fringes_fisher(params: &InterferometerParams) -> FisherReport {
    let (plus, minus) = optimal_basis(params.overlap()).expect("overlap validated");
    let rho = conditional_density_matrix(params);
    let d1 = conditional_density_matrix_derivative(params);
    let d2 = conditional_density_matrix_second_derivative(params);
    let mut value = fisher_term(
        double_probability(params),
        double_probability_derivative(params),
        double_probability_second_derivative(params),
    );
    for v in [plus.vector(), minus.vector()] {
        value += fisher_term(rho.expectation(&v), d1.expectation(&v), d2.expectation(&v));
    }
    FisherReport {
        theta: params.theta(),
        value,
        kind: FisherKind::OptimalBasis,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnhancementMode {
    /// Perfect spatial overlap, coincidence/double statistics only.
    FullOverlap,
    /// Overlap chosen per point to maximise the quantum Fisher information.
    OptimalOverlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnhancementPoint {
    pub visibility: f64,
    pub theta: f64,
    pub overlap: f64,
    pub fisher: f64,
    pub epsilon: f64,
}

/// `ε` over a `V × θ` grid, row-major in `V`.
pub fn enhancement_sweep(
    visibilities: &[f64],
    thetas: &[f64],
    mode: EnhancementMode,
) -> Result<Vec<EnhancementPoint>> {
    if visibilities.is_empty() || thetas.is_empty() {
        return Err(Error::Config("enhancement grid must be nonempty".into()));
    }
    let cells: Vec<(f64, f64)> = visibilities
        .iter()
        .flat_map(|&v| thetas.iter().map(move |&t| (v, t)))
        .collect();
    cells
        .into_par_iter()
        .map(|(v, theta)| {
            let (overlap, fisher) = match mode {
                EnhancementMode::FullOverlap => {
                    let p = InterferometerParams::new(theta, v, 1.0)?;
                    (1.0, classical_fisher(&p).value)
                }
                EnhancementMode::OptimalOverlap => optimise_overlap(theta, v)?,
            };
            Ok(EnhancementPoint {
                visibility: v,
                theta,
                overlap,
                fisher,
                epsilon: epsilon(fisher),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{golden_section_max, linspace};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn params(theta: f64, v: f64, d: f64) -> InterferometerParams {
        InterferometerParams::new(theta, v, d).unwrap()
    }

    /// `Σ p′²/p` over the given outcomes with derivatives by central differences.
    fn numeric_fisher(
        outcomes: impl Fn(&InterferometerParams) -> Vec<f64>,
        theta: f64,
        v: f64,
        d: f64,
    ) -> f64 {
        let h = 1e-6;
        let p0 = outcomes(&params(theta, v, d));
        let pp = outcomes(&params(theta + h, v, d));
        let pm = outcomes(&params(theta - h, v, d));
        p0.iter()
            .zip(pp.iter().zip(&pm))
            .map(|(p, (a, b))| {
                let dp = (a - b) / (2.0 * h);
                if *p > 1e-14 {
                    dp * dp / p
                } else {
                    0.0
                }
            })
            .sum()
    }

    #[test]
    fn classical_examples() {
        for i in 0..=20 {
            let f = classical_fisher(&params(PI * i as f64 / 20.0, 1.0, 1.0)).value;
            assert!((f - 4.0).abs() < 1e-12);
        }
        assert_eq!(classical_fisher(&params(FRAC_PI_2, 0.93, 1.0)).value, 0.0);
        let f = classical_fisher(&params(FRAC_PI_4, 0.0, 1.0)).value;
        assert!((f - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn classical_matches_finite_differences() {
        let outcomes = |p: &InterferometerParams| {
            vec![coincidence_probability(p), double_probability(p)]
        };
        for (theta, v, d) in [(0.3, 0.93, 1.0), (1.2, 0.5, 0.7), (2.5, 0.1, 0.2)] {
            let exact = classical_fisher(&params(theta, v, d)).value;
            assert!((exact - numeric_fisher(outcomes, theta, v, d)).abs() < 1e-6);
        }
    }

    #[test]
    fn rl_examples() {
        for v in [0.0, 0.4, 0.93, 0.999] {
            assert_eq!(fisher_rl(&params(FRAC_PI_2, v, 1.0)).value, 0.0);
            assert!((fisher_rl(&params(FRAC_PI_2, v, 0.0)).value - 2.0).abs() < 1e-15);
        }
        let f = fisher_rl(&params(FRAC_PI_2, 0.93, 0.68)).value;
        assert!((f - 0.64).abs() < 1e-12);
    }

    #[test]
    fn rl_matches_diagonal_statistics() {
        let outcomes = |p: &InterferometerParams| {
            let rho = conditional_density_matrix(p);
            let m = rho.matrix();
            vec![m[(0, 0)], m[(1, 1)], m[(2, 2)], double_probability(p)]
        };
        for (theta, v, d) in [(0.3, 0.93, 0.68), (1.2, 0.5, 0.7), (2.5, 0.1, 0.2), (1.0, 1.0, 0.4)] {
            let exact = fisher_rl(&params(theta, v, d)).value;
            assert!((exact - numeric_fisher(outcomes, theta, v, d)).abs() < 1e-6);
        }
    }

    #[test]
    fn rl_at_unit_visibility_is_constant() {
        let d = 0.3;
        for i in 0..=20 {
            let f = fisher_rl(&params(PI * i as f64 / 20.0, 1.0, d)).value;
            assert!((f - 2.0 * (1.0 + d)).abs() < 1e-12);
        }
    }

    #[test]
    fn quantum_examples() {
        for i in 0..=20 {
            let f = quantum_fisher(&params(PI * i as f64 / 20.0, 1.0, 1.0)).value;
            assert!((f - 4.0).abs() < 1e-12);
        }
        for (v, d) in [(0.3, 0.2), (0.93, 0.68), (1.0, 0.5)] {
            let f = quantum_fisher(&params(0.0, v, d)).value;
            assert!((f - 2.0 * (1.0 + d * v)).abs() < 1e-12);
        }
        let f = quantum_fisher(&params(FRAC_PI_2, 0.93, 0.68)).value;
        let expected = 2.0 * (1.0 - 0.68 * 0.68) / (1.0 - 0.68 * 0.93);
        assert!((f - expected).abs() < 1e-12);
        assert!((f - 2.9249).abs() < 5e-5);
        let v: f64 = 0.93;
        let best = 4.0 * (1.0 - (1.0 - v * v).sqrt()) / (v * v);
        let at_opt = quantum_fisher(&params(FRAC_PI_2, v, optimal_overlap(v).unwrap())).value;
        assert!((at_opt - best).abs() < 1e-12);
    }

    #[test]
    fn quantum_matches_sld_route() {
        for i in 0..=12 {
            for (v, d) in [(0.93, 0.68), (0.5, 0.9), (0.1, 0.1), (1.0, 0.5), (0.0, 0.0)] {
                let p = params(PI * i as f64 / 12.0, v, d);
                let closed = quantum_fisher(&p).value;
                let sld_route = quantum_fisher_from_sld(&p).unwrap();
                assert!((closed - sld_route).abs() < 1e-9, "{p:?}: {closed} vs {sld_route}");
            }
        }
    }

    #[test]
    fn ordering_on_dense_grid() {
        for i in 0..=60 {
            for j in 0..=20 {
                for k in 0..=20 {
                    let p = params(PI * i as f64 / 60.0, j as f64 / 20.0, k as f64 / 20.0);
                    let q = quantum_fisher(&p).value;
                    assert!(classical_fisher(&p).value <= q + 1e-10, "{p:?}");
                    assert!(fisher_rl(&p).value <= q + 1e-10, "{p:?}");
                }
            }
        }
    }

    #[test]
    fn dark_fringe_formulas() {
        for j in 0..=20 {
            for k in 0..=20 {
                let (v, d) = (j as f64 / 20.0, k as f64 / 20.0);
                let p = params(FRAC_PI_2, v, d);
                if (1.0 - d * v).abs() > 1e-6 {
                    let eq = 2.0 * (1.0 - d * d) / (1.0 - d * v);
                    assert!((quantum_fisher(&p).value - eq).abs() < 1e-12);
                }
                if v < 1.0 {
                    assert_eq!(fisher_rl(&p).value, 2.0 * (1.0 - d));
                }
            }
        }
    }

    #[test]
    fn optimal_overlap_examples() {
        assert_eq!(optimal_overlap(1.0).unwrap(), 1.0);
        assert_eq!(optimal_overlap(0.0).unwrap(), 0.0);
        assert!((optimal_overlap(0.93).unwrap() - 0.68).abs() < 5e-5);
        assert!(optimal_overlap(1.5).is_err());
    }

    #[test]
    fn optimal_overlap_maximises_dark_fringe_qfi() {
        for j in 1..=100 {
            let v = j as f64 / 100.0;
            let (d, _) = optimise_overlap(FRAC_PI_2, v).unwrap();
            let closed = optimal_overlap(v).unwrap();
            assert!((d - closed).abs() < 1e-8, "V={v}: {d} vs {closed}");
            let (g, _) = golden_section_max(
                |d| quantum_fisher(&params(FRAC_PI_2, v, d)).value,
                0.0,
                1.0,
                1e-10,
            );
            assert!((g - closed).abs() < 1e-6);
        }
    }

    #[test]
    fn overlap_optimum_is_unimodal() {
        for theta in linspace(0.0, PI, 25) {
            for v in linspace(0.05, 1.0, 20) {
                let values: Vec<f64> = linspace(0.0, 1.0, 2001)
                    .into_iter()
                    .map(|d| quantum_fisher(&params(theta, v, d)).value)
                    .collect();
                let peak = values
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap()
                    .0;
                for w in values[..=peak].windows(2) {
                    assert!(w[1] >= w[0] - 1e-12, "θ={theta} V={v}");
                }
                for w in values[peak..].windows(2) {
                    assert!(w[1] <= w[0] + 1e-12, "θ={theta} V={v}");
                }
                let (_, best) = optimise_overlap(theta, v).unwrap();
                assert!(best >= values[peak] - 1e-12);
            }
        }
    }

    #[test]
    fn sub_shot_noise_at_optimal_overlap() {
        for v in linspace(1e-3, 1.0, 200) {
            let f = 4.0 * (1.0 - (1.0 - v * v).sqrt()) / (v * v);
            assert!(f > 2.0);
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        for d in linspace(0.0, 1.0, 21) {
            let abg = alpha_beta_gamma(d);
            for (i, x) in abg.iter().enumerate() {
                for (j, y) in abg.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((x.dot(y) - expected).abs() < 1e-12);
                }
            }
            let (plus, minus) = optimal_basis(d).unwrap();
            assert!((plus.norm() - 1.0).abs() < 1e-12);
            assert!((minus.norm() - 1.0).abs() < 1e-12);
            assert!(plus.dot(&minus).abs() < 1e-12);
        }
    }

    #[test]
    fn optimal_basis_limits() {
        let (plus, minus) = optimal_basis(0.0).unwrap();
        assert!((plus.vector() - Vector4::new(0.0, 1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((minus.vector() - Vector4::new(0.0, 0.0, 1.0, 0.0)).norm() < 1e-15);
        let (plus, minus) = optimal_basis(1.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((plus.vector() - Vector4::new(h, 0.5, -0.5, 0.0)).norm() < 1e-15);
        assert!((minus.vector() - Vector4::new(h, -0.5, 0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn density_matrix_in_adapted_basis() {
        for (theta, v, d) in [(0.4, 0.93, 0.68), (FRAC_PI_2, 0.5, 0.2), (2.9, 0.0, 1.0)] {
            let p = params(theta, v, d);
            let rho = conditional_density_matrix(&p);
            let [a, b, g] = alpha_beta_gamma(d);
            let m = rho.matrix();
            let elem = |x: &SpatialBasisVector, y: &SpatialBasisVector| {
                x.vector().dot(&(m * y.vector()))
            };
            let s2 = theta.sin().powi(2);
            assert!((elem(&a, &a) - 0.5 * (1.0 + d) * (1.0 - 0.5 * (1.0 + v) * s2)).abs() < 1e-12);
            assert!((elem(&a, &b) - 0.5 * (1.0 - d * d).sqrt() * theta.cos()).abs() < 1e-12);
            assert!((elem(&b, &b) - 0.5 * (1.0 - d) * (1.0 - 0.5 * (1.0 - v) * s2)).abs() < 1e-12);
            assert!(elem(&g, &g).abs() < 1e-12);
            assert!(elem(&a, &g).abs() < 1e-12);
            assert!(elem(&b, &g).abs() < 1e-12);
        }
    }

    #[test]
    fn sld_at_dark_fringe() {
        let (v, d) = (0.93, 0.68);
        let l = sld(&params(FRAC_PI_2, v, d)).unwrap();
        let coeff = -2.0 * (1.0 - d * d).sqrt() / (1.0 - d * v);
        assert!((l.matrix[(0, 1)] - coeff).abs() < 1e-10);
        assert!((l.matrix[(1, 0)] - coeff).abs() < 1e-10);
        assert!(l.matrix[(0, 0)].abs() < 1e-10);
        assert!(l.matrix[(1, 1)].abs() < 1e-10);
        assert!((coeff + 3.98918).abs() < 1e-5);

        let l = sld(&params(FRAC_PI_2, 0.5, 1.0)).unwrap();
        assert!(l.matrix.abs().max() < 1e-12);
    }

    #[test]
    fn sld_solves_defining_equation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        for _ in 0..200 {
            let theta = rng.random_range(h..PI - h);
            let v = rng.random_range(0.0..=1.0);
            let d = rng.random_range(0.0..=1.0);
            let p = params(theta, v, d);
            let l = sld(&p).unwrap();
            let full = l.full();
            assert!((full - full.transpose()).abs().max() < 1e-12);
            let fd = (conditional_density_matrix(&params(theta + h, v, d)).matrix()
                - conditional_density_matrix(&params(theta - h, v, d)).matrix())
                / (2.0 * h);
            let rho = conditional_density_matrix(&p);
            assert!(l.residual(rho.matrix(), &fd) < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn optimal_fringes_examples() {
        let f = optimal_fringes(&params(0.0, 0.6, 0.3));
        assert_eq!(f.double, 0.0);
        assert!((f.coincidence_plus + f.coincidence_minus - 1.0).abs() < 1e-12);
        let f = optimal_fringes(&params(FRAC_PI_2, 0.93, 0.68));
        assert!((f.coincidence_plus - f.coincidence_minus).abs() < 1e-15);
        for i in 0..=20 {
            let f = optimal_fringes(&params(PI * i as f64 / 20.0, 0.7, 0.45));
            assert!(f.residual.abs() < 1e-12);
            assert!((f.coincidence_plus + f.coincidence_minus + f.double + f.residual - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn optimal_fringes_saturate_quantum_fisher() {
        for j in 1..=10 {
            let v = j as f64 / 10.0;
            let d = optimal_overlap(v).unwrap();
            let p = params(FRAC_PI_2, v, d);
            let fringes = optimal_fringes_fisher(&p).value;
            let q = quantum_fisher(&p).value;
            assert!((fringes - q).abs() < 1e-9, "V={v}: {fringes} vs {q}");
        }
    }

    #[test]
    fn enhancement_rows() {
        let thetas = linspace(0.0, PI, 41);
        let visibilities = [0.0, 0.3, 0.93, 1.0];
        for mode in [EnhancementMode::FullOverlap, EnhancementMode::OptimalOverlap] {
            let grid = enhancement_sweep(&visibilities, &thetas, mode).unwrap();
            assert_eq!(grid.len(), thetas.len() * visibilities.len());
            for pt in grid.iter().filter(|p| p.visibility == 1.0) {
                assert!((pt.epsilon - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            }
            if mode == EnhancementMode::OptimalOverlap {
                for pt in grid.iter().filter(|p| p.visibility > 0.0) {
                    assert!(pt.epsilon < 1.0, "{pt:?}");
                }
            }
        }
        let grid =
            enhancement_sweep(&[0.93], &[FRAC_PI_2], EnhancementMode::FullOverlap).unwrap();
        assert_eq!(grid[0].epsilon, f64::INFINITY);
        assert!(enhancement_sweep(&[], &thetas, EnhancementMode::FullOverlap).is_err());
    }

    #[test]
    fn sweep_is_deterministic() {
        let thetas = linspace(0.0, PI, 33);
        let vs = linspace(0.0, 1.0, 17);
        let a = enhancement_sweep(&vs, &thetas, EnhancementMode::OptimalOverlap).unwrap();
        let b = enhancement_sweep(&vs, &thetas, EnhancementMode::OptimalOverlap).unwrap();
        assert_eq!(a, b);
    }
}
