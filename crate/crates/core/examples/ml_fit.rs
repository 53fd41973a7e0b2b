//! Maximum-likelihood calibration of phase and visibility from simulated
//! events, at growing sample sizes.

use mzi_modes::estimation::{max_likelihood_fit, sample_events};
use mzi_modes::spatial::SpatialModePair;

fn main() -> mzi_modes::Result<()> {
    let pair = SpatialModePair::from_ratio(1.64)?;
    println!("events   theta    V        loglik");
    for (i, n) in [600, 6000, 60_000].into_iter().enumerate() {
        let events = sample_events(1.47, 0.93, pair, n, 7 + i as u64)?;
        let fit = max_likelihood_fit(&events, &pair)?;
        println!(
            "{n:6}   {:.4}   {:.4}   {:.2}{}",
            fit.theta,
            fit.visibility,
            fit.loglik,
            if fit.boundary { "  (boundary)" } else { "" }
        );
    }
    Ok(())
}
