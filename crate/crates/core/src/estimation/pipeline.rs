use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::estimator::LocalEstimator;
use super::histogram::{BinSpec, Histogram};
use super::{count_kinds, EventRecord};
use crate::error::{Error, Result};
use crate::fisher::{classical_fisher, quantum_fisher};
use crate::model::InterferometerParams;
use crate::numeric::CompensatedSum;
use crate::spatial::{overlap_from_geometry, SpatialModePair};

/// Resamples drawn from one RNG stream in the bootstrap.
const BOOTSTRAP_BLOCK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub theta0: f64,
    pub visibility: f64,
    pub pair: SpatialModePair,
    pub subset_size: usize,
    pub bin_width: f64,
    pub bootstrap_resamples: usize,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(theta0: f64, visibility: f64, pair: SpatialModePair) -> Self {
        Self {
            theta0,
            visibility,
            pair,
            subset_size: 10,
            bin_width: BinSpec::DEFAULT_BIN_WIDTH,
            bootstrap_resamples: 10_000,
            seed: 0,
        }
    }
}

/// Per-subset estimates and the resulting precision figures for one data set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationReport {
    pub label: Option<f64>,
    pub theta0: f64,
    pub estimates: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation of the estimates.
    pub std: f64,
    /// `std · √(2·subset_size)`: the shot-noise reference for `subset_size`
    /// pairs is `1/√(2·subset_size)`.
    pub epsilon: f64,
    /// `epsilon ± 2·bootstrap_sd`.
    pub epsilon_ci: (f64, f64),
    pub bootstrap_sd: f64,
    pub subset_size: usize,
    pub n_subsets: usize,
    pub n_events: usize,
    pub n_coincidences: usize,
    pub fisher_c: f64,
    /// Pair-counting Fisher information at `θ0` with the geometric overlap.
    pub fisher_pair: f64,
    pub fisher_quantum: f64,
    /// `1/√(subset_size · F_c)`.
    pub cramer_rao_std: f64,
}

/// Runs the subset estimator over `events` and bootstraps the precision.
pub fn precision_pipeline(events: &[EventRecord], config: &PipelineConfig) -> Result<EstimationReport> {
    let n = config.subset_size;
    if n == 0 {
        return Err(Error::Config("subset_size must be at least 1".into()));
    }
    if events.len() < 2 * n {
        return Err(Error::InsufficientData(format!(
            "{} events, need at least {} for subsets of {n}",
            events.len(),
            2 * n
        )));
    }
    let (n_coincidences, _) = count_kinds(events);
    if n_coincidences == 0 {
        return Err(Error::InsufficientData("no coincidence events".into()));
    }
    let edges = BinSpec::for_pair(&config.pair, config.bin_width)?.edges();
    let estimator = LocalEstimator::new(config.theta0, config.visibility, config.pair, edges)?;

    let estimates = events
        .par_chunks_exact(n)
        .map(|chunk| {
            let hist = Histogram::from_events(estimator.edges().to_vec(), chunk)?;
            estimator.estimate(&hist)
        })
        .collect::<Result<Vec<f64>>>()?;

    let (mean, std) = mean_std(&estimates);
    let scale = (2.0 * n as f64).sqrt();
    let epsilon = std * scale;
    let bootstrap_sd = bootstrap_epsilon(&estimates, n, config.bootstrap_resamples, config.seed)?;

    let params = InterferometerParams::new(
        config.theta0,
        config.visibility,
        overlap_from_geometry(&config.pair),
    )?;
    let fisher_c = estimator.fisher_c();
    Ok(EstimationReport {
        label: None,
        theta0: config.theta0,
        n_subsets: estimates.len(),
        estimates,
        mean,
        std,
        epsilon,
        epsilon_ci: (epsilon - 2.0 * bootstrap_sd, epsilon + 2.0 * bootstrap_sd),
        bootstrap_sd,
        subset_size: n,
        n_events: events.len(),
        n_coincidences,
        fisher_c,
        fisher_pair: classical_fisher(&params).value,
        fisher_quantum: quantum_fisher(&params).value,
        cramer_rao_std: 1.0 / (n as f64 * fisher_c).sqrt(),
    })
}

/// One report per labelled data set, all estimated around `config.theta0`.
pub fn precision_pipeline_by_phase(
    events_by_phase: &[(f64, Vec<EventRecord>)],
    config: &PipelineConfig,
) -> Result<Vec<EstimationReport>> {
    events_by_phase
        .iter()
        .map(|(label, events)| {
            let mut report = precision_pipeline(events, config)?;
            report.label = Some(*label);
            Ok(report)
        })
        .collect()
}

/// Standard deviation of `ε` over nonparametric bootstrap resamples of the
/// subset estimates.
pub fn bootstrap_epsilon(estimates: &[f64], subset_size: usize, resamples: usize, seed: u64) -> Result<f64> {
    if estimates.len() < 2 {
        return Err(Error::InsufficientData("bootstrap needs at least two estimates".into()));
    }
    if resamples < 2 {
        return Err(Error::Config("bootstrap needs at least two resamples".into()));
    }
    let scale = (2.0 * subset_size as f64).sqrt();
    let m = estimates.len();
    let blocks = resamples.div_ceil(BOOTSTRAP_BLOCK);
    let eps: Vec<f64> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BOOTSTRAP_BLOCK.min(resamples - b * BOOTSTRAP_BLOCK);
            let mut draw = vec![0.0; m];
            (0..len)
                .map(|_| {
                    for slot in draw.iter_mut() {
                        *slot = estimates[rng.random_range(0..m)];
                    }
                    mean_std(&draw).1 * scale
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(mean_std(&eps).1)
}

/// Mean and sample (n − 1) standard deviation.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().copied().collect::<CompensatedSum>().value() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = xs
        .iter()
        .map(|x| (x - mean).powi(2))
        .collect::<CompensatedSum>()
        .value();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::sample_events;
    use std::f64::consts::FRAC_PI_2;

    fn config() -> PipelineConfig {
        let mut c = PipelineConfig::new(FRAC_PI_2, 0.93, SpatialModePair::from_ratio(1.64).unwrap());
        c.bootstrap_resamples = 2000;
        c.seed = 7;
        c
    }

    #[test]
    fn mean_std_known_values() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn subsets_are_sequential_and_disjoint() {
        let c = config();
        let events = sample_events(FRAC_PI_2, 0.93, c.pair, 65, 1).unwrap();
        let report = precision_pipeline(&events, &c).unwrap();
        assert_eq!(report.n_subsets, 6);
        let edges = BinSpec::for_pair(&c.pair, c.bin_width).unwrap().edges();
        let est = LocalEstimator::new(c.theta0, c.visibility, c.pair, edges.clone()).unwrap();
        for (k, chunk) in events.chunks_exact(10).enumerate() {
            let h = Histogram::from_events(edges.clone(), chunk).unwrap();
            assert_eq!(report.estimates[k], est.estimate(&h).unwrap());
        }
        assert_eq!(report.epsilon, report.std * 20f64.sqrt());
    }

    #[test]
    fn dark_fringe_is_sub_shot_noise() {
        let c = config();
        let events = sample_events(FRAC_PI_2, 0.93, c.pair, 6000, 11).unwrap();
        let r = precision_pipeline(&events, &c).unwrap();
        assert_eq!(r.n_subsets, 600);
        assert!(r.epsilon < 1.0, "{}", r.epsilon);
        assert!(r.epsilon_ci.0 < r.epsilon && r.epsilon < r.epsilon_ci.1);
        assert!(r.fisher_c > r.fisher_pair);
        assert!(r.fisher_c <= r.fisher_quantum + 1e-9);
    }

    #[test]
    fn rejects_degenerate_input() {
        let pair = SpatialModePair::from_ratio(0.0).unwrap();
        let events = sample_events(FRAC_PI_2, 1.0, pair, 100, 1).unwrap();
        let c = PipelineConfig { pair, visibility: 1.0, ..config() };
        assert!(matches!(precision_pipeline(&events, &c), Err(Error::InsufficientData(_))));
        let events = sample_events(FRAC_PI_2, 0.93, config().pair, 19, 1).unwrap();
        assert!(matches!(precision_pipeline(&events, &config()), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let xs: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let a = bootstrap_epsilon(&xs, 10, 1000, 3).unwrap();
        assert_eq!(a, bootstrap_epsilon(&xs, 10, 1000, 3).unwrap());
        assert!(a > 0.0);
        // Resampling sd of a sample sd is roughly s/√(2m) for near-normal data.
        let (_, s) = mean_std(&xs);
        let rough = s * 20f64.sqrt() / (2.0 * 50.0f64).sqrt();
        assert!(a > 0.3 * rough && a < 3.0 * rough, "{a} {rough}");
    }

    #[test]
    fn by_phase_labels() {
        let c = config();
        let data: Vec<(f64, Vec<EventRecord>)> = [FRAC_PI_2 - 0.1, FRAC_PI_2]
            .iter()
            .map(|&t| (t, sample_events(t, 0.93, c.pair, 200, 2).unwrap()))
            .collect();
        let reports = precision_pipeline_by_phase(&data, &c).unwrap();
        assert_eq!(reports[0].label, Some(FRAC_PI_2 - 0.1));
        assert_eq!(reports[1].n_events, 200);
    }
}
