//! Position-resolved coincidence density and the Fisher information it
//! recovers at the dark fringe.

use std::f64::consts::FRAC_PI_2;

use mzi_modes::fisher::{classical_fisher, quantum_fisher};
use mzi_modes::numeric::linspace;
use mzi_modes::spatial::{overlap_from_geometry, spatial_fisher, SpatialModePair, SpatialModel};

fn main() -> mzi_modes::Result<()> {
    let pair = SpatialModePair::new(122.0, 200.0)?;
    println!(
        "sigma = 122 um, d = 200 um: d/sigma = {:.4}, D = {:.4}",
        pair.d_over_sigma(),
        overlap_from_geometry(&pair)
    );

    for theta in [FRAC_PI_2 - 0.1, FRAC_PI_2, FRAC_PI_2 + 0.1] {
        let model = SpatialModel::new(theta, 0.93, pair)?;
        let f = spatial_fisher(&model)?;
        println!(
            "θ={theta:.4}: F_c={:.5} F_d={:.5} F={:.5} (pair {:.5}, quantum {:.5}) eps={:.4}",
            f.coincidence,
            f.double,
            f.total,
            classical_fisher(model.params()).value,
            quantum_fisher(model.params()).value,
            f.report().epsilon()
        );
    }

    let model = SpatialModel::new(FRAC_PI_2 + 0.1, 0.93, pair)?;
    println!("\nxi/sigma   p_c(xi)");
    for xi in linspace(-6.0, 6.0, 13) {
        println!("{xi:6.2}   {:.6}", model.relative_density(xi));
    }
    Ok(())
}
