//! Optimal overlap, the symmetric logarithmic derivative and the spatial
//! measurement that saturates the quantum Fisher information.

use std::f64::consts::FRAC_PI_2;

use mzi_modes::fisher::{
    optimal_fringes, optimal_fringes_fisher, optimal_overlap, quantum_fisher, sld,
};
use mzi_modes::InterferometerParams;

fn main() -> mzi_modes::Result<()> {
    println!("   V     D_opt    F_Q      F_meas   eps");
    for v in [0.2, 0.5, 0.8, 0.93, 1.0] {
        let d = optimal_overlap(v)?;
        let p = InterferometerParams::new(FRAC_PI_2, v, d)?;
        let fq = quantum_fisher(&p);
        let fm = optimal_fringes_fisher(&p);
        println!(
            "{v:5.2}  {d:.5}  {:.6}  {:.6}  {:.4}",
            fq.value,
            fm.value,
            fq.epsilon()
        );
    }

    let p = InterferometerParams::new(FRAC_PI_2, 0.93, optimal_overlap(0.93)?)?;
    let l = sld(&p)?;
    println!("\nSLD at the dark fringe (alpha/beta block):\n{}", l.matrix);

    println!("theta    p_c+      p_c-      p_d");
    for theta in [1.2, 1.4, FRAC_PI_2, 1.8] {
        let f = optimal_fringes(&p.with_theta(theta)?);
        println!(
            "{theta:.4}  {:.6}  {:.6}  {:.6}",
            f.coincidence_plus, f.coincidence_minus, f.double
        );
    }
    Ok(())
}
