use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::EventRecord;
use crate::error::{Error, Result};
use crate::model::{coincidence_probability, double_probability};
use crate::spatial::{SpatialModePair, SpatialModel};

/// Events drawn from one RNG stream. Stream `k` of the seed produces events
/// `k·SAMPLER_BLOCK ..`, so output does not depend on the thread count.
pub const SAMPLER_BLOCK: usize = 1000;

const MIN_ACCEPTANCE: f64 = 1e-4;

/// Draws `n` detection events at phase `theta_true`.
///
/// The event kind is Bernoulli in the double-event probability. Coincidence
/// positions are drawn from the joint density by rejection from the mixture
/// `cos⁴(θ/2) a²(x) b²(x′) + sin⁴(θ/2) b²(x) a²(x′)`, which dominates it
/// because the coherent cross term only subtracts.
pub fn sample_events(
    theta_true: f64,
    visibility: f64,
    pair: SpatialModePair,
    n: usize,
    seed: u64,
) -> Result<Vec<EventRecord>> {
    if n == 0 {
        return Err(Error::Config("number of events must be at least 1".into()));
    }
    let model = SpatialModel::new(theta_true, visibility, pair)?;
    let p = model.params();
    let p_d = double_probability(p);
    let t = crate::trig::PhaseTrig::new(theta_true);
    let c4 = t.cos_half.powi(4);
    let s4 = t.sin_half.powi(4);
    let p_c = coincidence_probability(p);
    if p_d < 1.0 {
        let rate = p_c / (c4 + s4);
        if rate < MIN_ACCEPTANCE {
            return Err(Error::RejectionStall { rate });
        }
    }
    let kind = Bernoulli::new(p_d.clamp(0.0, 1.0)).expect("probability in [0, 1]");
    let half_d = 0.5 * pair.d_over_sigma();
    let first = c4 / (c4 + s4);

    let blocks = n.div_ceil(SAMPLER_BLOCK);
    let per_block: Vec<Vec<EventRecord>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = SAMPLER_BLOCK.min(n - b * SAMPLER_BLOCK);
            (0..len)
                .map(|_| {
                    if kind.sample(&mut rng) {
                        return EventRecord::Double;
                    }
                    loop {
                        let sign = if rng.random::<f64>() < first { 1.0 } else { -1.0 };
                        let zx: f64 = rng.sample(StandardNormal);
                        let zxp: f64 = rng.sample(StandardNormal);
                        let x = sign * half_d + zx;
                        let x_prime = -sign * half_d + zxp;
                        let target = model.joint_density(x, x_prime);
                        let envelope = envelope(&model, c4, s4, x, x_prime);
                        if rng.random::<f64>() * envelope < target {
                            return EventRecord::Coincidence { x, x_prime };
                        }
                    }
                })
                .collect()
        })
        .collect();
    Ok(per_block.into_iter().flatten().collect())
}

fn envelope(model: &SpatialModel, c4: f64, s4: f64, x: f64, xp: f64) -> f64 {
    let (ax, bx) = model.profiles_at(x);
    let (axp, bxp) = model.profiles_at(xp);
    c4 * (ax * bxp).powi(2) + s4 * (bx * axp).powi(2)
}
