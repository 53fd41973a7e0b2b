use super::histogram::Histogram;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::quadrature::GaussLegendre;
use crate::spatial::{spatial_fisher, SpatialModePair, SpatialModel};

/// Nodes used to integrate the model density over one bin.
const BIN_RULE: usize = 8;

/// Locally unbiased phase estimator around `θ0`, discretised on fixed bins:
///
/// `θ̃ = θ0 + (1/F_c(θ0)) Σ_b f_b w_b · ∂_θ p_c(ξ_b|θ0) / p_c(ξ_b|θ0)`,
///
/// where `f_b w_b` is the fraction of all detection events whose `ξ` falls
/// into bin `b`, so that its expectation is the coincidence probability of
/// the bin.
#[derive(Debug, Clone)]
pub struct LocalEstimator {
    theta0: f64,
    edges: Vec<f64>,
    /// `p′/p` at each bin midpoint; `None` where the model density vanishes.
    scores: Vec<Option<f64>>,
    fisher_c: f64,
}

impl LocalEstimator {
    pub fn new(theta0: f64, visibility: f64, pair: SpatialModePair, edges: Vec<f64>) -> Result<Self> {
        if !(theta0 > 0.0 && theta0 < std::f64::consts::PI) {
            return Err(Error::InvalidParameter {
                name: "theta0",
                value: theta0,
                reason: "operating point must lie in (0, π)",
            });
        }
        Histogram::new(edges.clone())?;
        let model = SpatialModel::new(theta0, visibility, pair)?;
        let fisher_c = spatial_fisher(&model)?.coincidence;
        if !(fisher_c > 0.0) {
            return Err(Error::Config(format!(
                "coincidence Fisher information vanishes at θ0 = {theta0}; the estimator is undefined"
            )));
        }
        let scores = edges
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let p = model.relative_density(mid);
                (p >= 1e-300).then(|| model.relative_density_derivative(mid) / p)
            })
            .collect();
        Ok(Self {
            theta0,
            edges,
            scores,
            fisher_c,
        })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// `F_c(θ0)`, the coincidence part of the spatially resolved Fisher information.
    pub fn fisher_c(&self) -> f64 {
        self.fisher_c
    }

    pub fn estimate(&self, hist: &Histogram) -> Result<f64> {
        if hist.edges() != self.edges.as_slice() {
            return Err(Error::Config("histogram binning differs from the estimator's".into()));
        }
        if hist.events() == 0 {
            return Err(Error::EmptyHistogram);
        }
        let n = hist.events() as f64;
        let mut acc = CompensatedSum::new();
        for ((&count, score), mid) in hist.counts().iter().zip(&self.scores).zip(hist.midpoints()) {
            if count == 0 {
                continue;
            }
            match score {
                Some(s) => acc.add(count as f64 * s),
                None => {
                    return Err(Error::ZeroDensityBin {
                        centre: mid,
                        density: 0.0,
                    })
                }
            }
        }
        Ok(self.theta0 + acc.value() / (n * self.fisher_c))
    }

    /// Estimate from per-bin event probabilities instead of counts.
    pub fn estimate_from_frequencies(&self, frequencies: &[f64]) -> Result<f64> {
        if frequencies.len() != self.scores.len() {
            return Err(Error::Config("frequency vector length differs from bin count".into()));
        }
        let mut acc = CompensatedSum::new();
        for (i, (&f, score)) in frequencies.iter().zip(&self.scores).enumerate() {
            if f == 0.0 {
                continue;
            }
            match score {
                Some(s) => acc.add(f * s),
                None => {
                    return Err(Error::ZeroDensityBin {
                        centre: 0.5 * (self.edges[i] + self.edges[i + 1]),
                        density: 0.0,
                    })
                }
            }
        }
        Ok(self.theta0 + acc.value() / self.fisher_c)
    }
}

/// Convenience wrapper building the estimator on the histogram's own bins.
pub fn unbiased_estimate(
    hist: &Histogram,
    theta0: f64,
    visibility: f64,
    pair: SpatialModePair,
) -> Result<f64> {
    LocalEstimator::new(theta0, visibility, pair, hist.edges().to_vec())?.estimate(hist)
}

/// Probability per detection event that `ξ` falls into each bin.
pub fn expected_bin_probabilities(model: &SpatialModel, edges: &[f64]) -> Vec<f64> {
    let rule = GaussLegendre::new(BIN_RULE);
    edges
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let half = 0.5 * (w[1] - w[0]);
            let mut acc = CompensatedSum::new();
            for (t, wt) in rule.nodes().iter().zip(rule.weights()) {
                acc.add(wt * half * model.relative_density(mid + half * t));
            }
            acc.value()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{sample_events, BinSpec, EventRecord};
    use std::f64::consts::FRAC_PI_2;

    fn setup(theta0: f64) -> (LocalEstimator, SpatialModePair) {
        let pair = SpatialModePair::from_ratio(1.64).unwrap();
        let edges = BinSpec::for_pair(&pair, 0.2).unwrap().edges();
        (LocalEstimator::new(theta0, 0.93, pair, edges).unwrap(), pair)
    }

    #[test]
    fn exact_frequencies_at_operating_point_return_it() {
        let (est, pair) = setup(FRAC_PI_2);
        let model = SpatialModel::new(FRAC_PI_2, 0.93, pair).unwrap();
        let probs = expected_bin_probabilities(&model, est.edges());
        assert_eq!(est.estimate_from_frequencies(&probs).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn exact_frequencies_track_small_shifts() {
        let (est, pair) = setup(FRAC_PI_2);
        for delta in [0.01, -0.01] {
            let model = SpatialModel::new(FRAC_PI_2 + delta, 0.93, pair).unwrap();
            let probs = expected_bin_probabilities(&model, est.edges());
            let theta = est.estimate_from_frequencies(&probs).unwrap();
            assert!((theta - FRAC_PI_2 - delta).abs() < 1e-3, "{theta}");
        }
    }

    #[test]
    fn away_from_dark_fringe_first_order_unbiased() {
        let theta0 = 1.2;
        let (est, pair) = setup(theta0);
        let model = SpatialModel::new(theta0, 0.93, pair).unwrap();
        let probs = expected_bin_probabilities(&model, est.edges());
        // Away from π/2 the double-event channel also carries information; the
        // coincidence-only estimator is centred only up to dp_c/dθ / F_c.
        let theta = est.estimate_from_frequencies(&probs).unwrap();
        let t = crate::trig::PhaseTrig::new(theta0);
        let dpc = -0.5 * (1.0 + 0.93 * model.params().overlap()) * t.sin_double();
        assert!((theta - theta0 - dpc / est.fisher_c()).abs() < 1e-4);
    }

    #[test]
    fn histogram_estimate_matches_manual_sum() {
        let (est, pair) = setup(FRAC_PI_2);
        let events = sample_events(FRAC_PI_2, 0.93, pair, 10, 5).unwrap();
        let hist = Histogram::from_events(est.edges().to_vec(), &events).unwrap();
        let model = SpatialModel::new(FRAC_PI_2, 0.93, pair).unwrap();
        let manual: f64 = events
            .iter()
            .filter_map(|e| e.xi())
            .map(|xi| {
                let b = hist.bin_of(xi).unwrap();
                let mid = 0.5 * (est.edges()[b] + est.edges()[b + 1]);
                model.relative_density_derivative(mid) / model.relative_density(mid)
            })
            .sum();
        let expected = FRAC_PI_2 + manual / (10.0 * est.fisher_c());
        assert!((est.estimate(&hist).unwrap() - expected).abs() < 1e-12);
        assert!((unbiased_estimate(&hist, FRAC_PI_2, 0.93, pair).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let (est, _) = setup(FRAC_PI_2);
        let empty = Histogram::new(est.edges().to_vec()).unwrap();
        assert!(matches!(est.estimate(&empty), Err(Error::EmptyHistogram)));
        let pair = SpatialModePair::from_ratio(0.0).unwrap();
        assert!(LocalEstimator::new(FRAC_PI_2, 0.93, pair, vec![-1.0, 1.0]).is_err());
        let pair = SpatialModePair::from_ratio(1.0).unwrap();
        assert!(LocalEstimator::new(0.0, 0.93, pair, vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn zero_density_bin_is_reported() {
        let pair = SpatialModePair::from_ratio(1.0).unwrap();
        let edges = vec![-200.0, -100.0, 0.0, 100.0];
        let est = LocalEstimator::new(FRAC_PI_2, 0.93, pair, edges.clone()).unwrap();
        let events = [EventRecord::Coincidence { x: -150.0, x_prime: 0.0 }];
        let hist = Histogram::from_events(edges, &events).unwrap();
        assert!(matches!(est.estimate(&hist), Err(Error::ZeroDensityBin { .. })));
    }
}
