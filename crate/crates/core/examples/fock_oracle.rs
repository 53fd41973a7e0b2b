//! Closed-form output amplitudes against direct bosonic evolution of the
//! input state, including the three-photon port statistics.

use mzi_modes::model::fock::three_photon_port_counts;
use mzi_modes::model::brute_force_oracle;
use mzi_modes::{beam_splitter_matrix, output_amplitudes, InterferometerParams};

fn main() -> mzi_modes::Result<()> {
    println!("beam splitter at θ = 1.0: {:?}", beam_splitter_matrix(1.0));
    let mut worst: f64 = 0.0;
    for (theta, v, d) in [(0.3, 0.93, 0.51), (1.57, 1.0, 1.0), (2.4, 0.2, 0.8)] {
        let p = InterferometerParams::new(theta, v, d)?;
        let diff = output_amplitudes(&p).max_abs_diff(&brute_force_oracle(&p));
        worst = worst.max(diff);
        println!("θ={theta:.2} V={v:.2} D={d:.2}: max |Δamplitude| = {diff:.2e}");
    }
    println!("worst deviation {worst:.2e}");

    let p = InterferometerParams::new(std::f64::consts::FRAC_PI_2, 1.0, 1.0)?;
    let [p30, p21, p12, p03] = three_photon_port_counts(&p);
    println!("three photons, balanced: p30={p30:.4} p21={p21:.4} p12={p12:.4} p03={p03:.4}");
    Ok(())
}
