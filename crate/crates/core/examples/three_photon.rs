//! Two photons in one port, one in the other: count fringes, F^(3), and the
//! displacement that restores sub-shot-noise precision at the singular phase.

use mzi_modes::numeric::linspace;
use mzi_modes::spatial::SpatialModePair;
use mzi_modes::three_photon::{
    fisher_three, optimize_displacement, singular_phase, three_photon_sweep, ThreePhotonParams,
};

fn main() -> mzi_modes::Result<()> {
    let theta0 = singular_phase();
    let v = 0.93;

    let ideal = fisher_three(&ThreePhotonParams::new(theta0, 1.0, SpatialModePair::from_ratio(0.0)?)?)?;
    let overlapping = fisher_three(&ThreePhotonParams::new(theta0, v, SpatialModePair::from_ratio(0.0)?)?)?;
    println!("theta0 = {theta0:.6}");
    println!("V=1.00 d=0: F3 = {:.6}  eps = {:.4}", ideal.value, ideal.epsilon());
    println!("V={v:.2} d=0: F3 = {:.6}  eps = {:.4}", overlapping.value, overlapping.epsilon());

    let opt = optimize_displacement(v, theta0)?;
    println!(
        "optimal d = {:.4} sigma: F3 = {:.6} (d=0: {:.6})",
        opt.d_over_sigma, opt.fisher, opt.fisher_at_zero
    );

    println!("\ntheta      p30      p21      p12      p03      F3       eps");
    let pair = SpatialModePair::from_ratio(opt.d_over_sigma)?;
    for p in three_photon_sweep(&linspace(0.0, std::f64::consts::PI, 11), v, pair)? {
        let c = p.counts;
        println!(
            "{:.4}  {:.5}  {:.5}  {:.5}  {:.5}  {:.5}  {:.4}",
            p.theta, c.p30, c.p21, c.p12, c.p03, p.fisher, p.epsilon
        );
    }
    Ok(())
}
