use std::f64::consts::PI;

use serde::Serialize;

use super::{count_kinds, EventRecord};
use crate::error::{Error, Result};
use crate::numeric::{golden_section_max, linspace, CompensatedSum};
use crate::spatial::{overlap_from_geometry, SpatialModePair};

const THETA_GRID: usize = 181;
const THETA_TOL: f64 = 1e-9;
const VISIBILITY_TOL: f64 = 1e-13;
const MAX_NEWTON: usize = 200;
const MIN_COINCIDENCES: usize = 10;

/// Maximum-likelihood estimate of `(θ, V)` from detection events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MlFit {
    pub theta: f64,
    pub visibility: f64,
    pub loglik: f64,
    /// Maximum attained on the edge of `[0, π] × [0, 1]`.
    pub boundary: bool,
    /// `false` when the data only constrain `sin²θ (1 + V)` (overlapping modes).
    pub identifiable: bool,
    pub n_coincidences: usize,
    pub n_doubles: usize,
}

/// Per-event `θ`-independent Gaussian factors.
struct Factors {
    r1: Vec<f64>,
    r2: Vec<f64>,
    t3: Vec<f64>,
    doubles: f64,
    overlap: f64,
}

impl Factors {
    fn new(events: &[EventRecord], pair: &SpatialModePair) -> Self {
        let d = pair.d_over_sigma();
        let mut f = Self {
            r1: Vec::new(),
            r2: Vec::new(),
            t3: Vec::new(),
            doubles: 0.0,
            overlap: overlap_from_geometry(pair),
        };
        for e in events {
            match e.xi() {
                Some(xi) => {
                    let r1 = (-(xi - d) * (xi - d) / 8.0).exp();
                    let r2 = (-(xi + d) * (xi + d) / 8.0).exp();
                    f.r1.push(r1);
                    f.r2.push(r2);
                    f.t3.push(r1 * r2);
                }
                None => f.doubles += 1.0,
            }
        }
        f
    }

    /// Coefficients of the likelihood terms linear in `V`:
    /// `p_c(ξ_k) = a_k − V b_k` and `p_d = a_d + V b_d`.
    fn linear_terms(&self, theta: f64) -> (Vec<(f64, f64)>, (f64, f64)) {
        let (s, c) = (0.5 * theta).sin_cos();
        let (c2, s2) = (c * c, s * s);
        let norm = 2.0 * PI.sqrt();
        let terms = self
            .r1
            .iter()
            .zip(&self.r2)
            .zip(&self.t3)
            .map(|((&r1, &r2), &t3)| {
                let diff = c2 * r1 - s2 * r2;
                let cross = 2.0 * c2 * s2 * t3;
                ((diff * diff + cross) / norm, cross / norm)
            })
            .collect();
        let sin2 = theta.sin().powi(2);
        (terms, (0.5 * sin2, 0.5 * sin2 * self.overlap))
    }

    fn loglik(&self, terms: &[(f64, f64)], double: (f64, f64), v: f64) -> f64 {
        let mut acc: CompensatedSum = terms.iter().map(|&(a, b)| (a - v * b).ln()).collect();
        if self.doubles > 0.0 {
            acc.add(self.doubles * (double.0 + v * double.1).ln());
        }
        acc.value()
    }

    fn score(&self, terms: &[(f64, f64)], double: (f64, f64), v: f64) -> (f64, f64) {
        let mut g = CompensatedSum::new();
        let mut h = CompensatedSum::new();
        for &(a, b) in terms {
            let r = b / (a - v * b);
            g.add(-r);
            h.add(-r * r);
        }
        if self.doubles > 0.0 {
            let r = double.1 / (double.0 + v * double.1);
            g.add(self.doubles * r);
            h.add(-self.doubles * r * r);
        }
        (g.value(), h.value())
    }

    /// Maximum over `V ∈ [0, 1]` at fixed `θ`. The log-likelihood is concave
    /// in `V`, so the sign of its slope brackets the maximiser.
    fn profile(&self, theta: f64) -> Result<(f64, f64)> {
        let (terms, double) = self.linear_terms(theta);
        let slope = |v| self.score(&terms, double, v);
        let v = if slope(0.0).0 <= 0.0 {
            0.0
        } else if slope(1.0).0 >= 0.0 {
            1.0
        } else {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut v = 0.5;
            let mut converged = false;
            for _ in 0..MAX_NEWTON {
                let (g, h) = slope(v);
                if g > 0.0 {
                    lo = v;
                } else {
                    hi = v;
                }
                let newton = v - g / h;
                let next = if newton > lo && newton < hi && h < 0.0 {
                    newton
                } else {
                    0.5 * (lo + hi)
                };
                if (next - v).abs() < VISIBILITY_TOL || hi - lo < VISIBILITY_TOL {
                    v = next;
                    converged = true;
                    break;
                }
                v = next;
            }
            if !converged {
                return Err(Error::NonConvergence(format!(
                    "visibility profile at θ = {theta} not resolved after {MAX_NEWTON} steps"
                )));
            }
            v
        };
        Ok((v, self.loglik(&terms, double, v)))
    }
}

/// Fits `(θ, V)` by maximising the likelihood of all events: `p_c(ξ|θ, V)` for
/// each coincidence and `p_d(θ, V)` for each double event.
///
/// `V` is profiled out exactly at each `θ`; `θ` is located on a 181-point grid
/// over `[0, π]` and refined by golden section.
pub fn max_likelihood_fit(events: &[EventRecord], pair: &SpatialModePair) -> Result<MlFit> {
    let (n_coincidences, n_doubles) = count_kinds(events);
    if n_coincidences < MIN_COINCIDENCES {
        return Err(Error::InsufficientData(format!(
            "{n_coincidences} coincidence events, need at least {MIN_COINCIDENCES}"
        )));
    }
    if pair.d_over_sigma() == 0.0 {
        // p_c(ξ) ∝ e^{−ξ²/4} for every (θ, V): only the double fraction is informative.
        let frac = n_doubles as f64 / events.len() as f64;
        let theta = frac.sqrt().asin();
        let f = Factors::new(events, pair);
        let (terms, double) = f.linear_terms(theta);
        return Ok(MlFit {
            theta,
            visibility: 1.0,
            loglik: f.loglik(&terms, double, 1.0),
            boundary: true,
            identifiable: false,
            n_coincidences,
            n_doubles,
        });
    }

    let f = Factors::new(events, pair);
    let grid = linspace(0.0, PI, THETA_GRID);
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &t) in grid.iter().enumerate() {
        let (_, ll) = f.profile(t)?;
        if ll > best.1 {
            best = (i, ll);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::NonConvergence("log-likelihood is -inf on the whole θ grid".into()));
    }
    let lo = grid[best.0.saturating_sub(1)];
    let hi = grid[(best.0 + 1).min(THETA_GRID - 1)];
    let mut failure = None;
    let (theta, _) = golden_section_max(
        |t| match f.profile(t) {
            Ok((_, ll)) => ll,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        THETA_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (visibility, loglik) = f.profile(theta)?;
    Ok(MlFit {
        theta,
        visibility,
        loglik,
        boundary: visibility <= 0.0 || visibility >= 1.0 || theta <= 0.0 || theta >= PI,
        identifiable: true,
        n_coincidences,
        n_doubles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::sample_events;
    use crate::spatial::SpatialModel;
    use std::f64::consts::FRAC_PI_4;

    fn pair() -> SpatialModePair {
        SpatialModePair::from_ratio(1.64).unwrap()
    }

    #[test]
    fn loglik_matches_model_densities() {
        let events = sample_events(1.3, 0.8, pair(), 300, 4).unwrap();
        let fit = max_likelihood_fit(&events, &pair()).unwrap();
        let model = SpatialModel::new(fit.theta, fit.visibility, pair()).unwrap();
        let p_d = crate::model::double_probability(model.params());
        let direct: f64 = events
            .iter()
            .map(|e| match e.xi() {
                Some(xi) => model.relative_density(xi).ln(),
                None => p_d.ln(),
            })
            .sum();
        assert!((fit.loglik - direct).abs() < 1e-8 * direct.abs());
    }

    #[test]
    fn fit_is_a_local_maximum() {
        let events = sample_events(1.47, 0.93, pair(), 3000, 9).unwrap();
        let fit = max_likelihood_fit(&events, &pair()).unwrap();
        let f = Factors::new(&events, &pair());
        for (dt, dv) in [(1e-3, 0.0), (-1e-3, 0.0), (0.0, 1e-3), (0.0, -1e-3)] {
            let v = (fit.visibility + dv).clamp(0.0, 1.0);
            let (terms, double) = f.linear_terms(fit.theta + dt);
            assert!(f.loglik(&terms, double, v) <= fit.loglik + 1e-9);
        }
    }

    #[test]
    fn recovers_truth_from_large_sample() {
        let events = sample_events(1.47, 0.93, pair(), 60_000, 21).unwrap();
        let fit = max_likelihood_fit(&events, &pair()).unwrap();
        assert!((fit.theta - 1.47).abs() < 0.02, "{fit:?}");
        assert!((fit.visibility - 0.93).abs() < 0.02, "{fit:?}");
        assert!(fit.identifiable && !fit.boundary);
    }

    #[test]
    fn overlapping_modes_are_flagged() {
        let p = SpatialModePair::from_ratio(0.0).unwrap();
        let events = sample_events(FRAC_PI_4, 1.0, p, 6000, 5).unwrap();
        let fit = max_likelihood_fit(&events, &p).unwrap();
        assert!(fit.visibility >= 0.99 && !fit.identifiable && fit.boundary);
        assert!((fit.theta - FRAC_PI_4).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn needs_coincidences() {
        let events = vec![EventRecord::Double; 50];
        assert!(matches!(
            max_likelihood_fit(&events, &pair()),
            Err(Error::InsufficientData(_))
        ));
    }
}
