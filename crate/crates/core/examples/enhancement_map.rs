//! Enhancement ratio over visibility and phase, with full overlap and with
//! the overlap tuned point by point.

use mzi_modes::fisher::{enhancement_sweep, EnhancementMode};
use mzi_modes::numeric::linspace;

fn main() -> mzi_modes::Result<()> {
    let vs = linspace(0.5, 1.0, 6);
    let thetas = linspace(0.2, std::f64::consts::FRAC_PI_2, 4);
    for (label, mode) in [
        ("full overlap", EnhancementMode::FullOverlap),
        ("optimal overlap", EnhancementMode::OptimalOverlap),
    ] {
        println!("{label}");
        print!("   V  ");
        for t in &thetas {
            print!("  θ={t:.3}");
        }
        println!();
        let points = enhancement_sweep(&vs, &thetas, mode)?;
        for row in points.chunks(thetas.len()) {
            print!("{:.2} ", row[0].visibility);
            for p in row {
                print!("  {:7.4}", p.epsilon);
            }
            println!();
        }
        println!();
    }
    Ok(())
}
