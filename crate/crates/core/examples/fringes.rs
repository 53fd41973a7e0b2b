//! Coincidence and double-count fringes for a few visibilities.

use mzi_modes::numeric::linspace;
use mzi_modes::{coincidence_probability, double_probability, InterferometerParams};

fn main() -> mzi_modes::Result<()> {
    println!("theta     V=1.00 p_c   V=0.93 p_c   V=0.93 p_d   single");
    for theta in linspace(0.0, std::f64::consts::PI, 13) {
        let ideal = InterferometerParams::new(theta, 1.0, 1.0)?;
        let real = InterferometerParams::new(theta, 0.93, 1.0)?;
        println!(
            "{theta:.4}    {:.6}     {:.6}     {:.6}     {:.6}",
            coincidence_probability(&ideal),
            coincidence_probability(&real),
            double_probability(&real),
            (0.5 * theta).cos().powi(2)
        );
    }
    Ok(())
}
