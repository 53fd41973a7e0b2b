use std::f64::consts::{FRAC_PI_2, PI};

/// Trigonometric functions of the phase and of the half phase.
///
/// Cosines are evaluated as sines of the complementary angle, so the
/// dark-fringe and end points (`θ = π/2`, `θ = π`) give exact zeros where the
/// physics has them instead of `6e-17` residues.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PhaseTrig {
    pub sin: f64,
    pub cos: f64,
    pub sin_half: f64,
    pub cos_half: f64,
}

impl PhaseTrig {
    pub fn new(theta: f64) -> Self {
        let sin = if theta > FRAC_PI_2 {
            (PI - theta).sin()
        } else {
            theta.sin()
        };
        let half = 0.5 * theta;
        Self {
            sin,
            cos: (FRAC_PI_2 - theta).sin(),
            sin_half: half.sin(),
            cos_half: (FRAC_PI_2 - half).sin(),
        }
    }

    /// `sin(2θ)`, the derivative of `sin²θ`.
    pub fn sin_double(&self) -> f64 {
        2.0 * self.sin * self.cos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_zeros_at_special_points() {
        assert_eq!(PhaseTrig::new(FRAC_PI_2).cos, 0.0);
        assert_eq!(PhaseTrig::new(PI).sin, 0.0);
        assert_eq!(PhaseTrig::new(PI).cos_half, 0.0);
        assert_eq!(PhaseTrig::new(0.0).sin_half, 0.0);
        assert_eq!(PhaseTrig::new(0.0).cos, 1.0);
    }

    #[test]
    fn agrees_with_std() {
        for i in 0..=200 {
            let theta = PI * i as f64 / 200.0;
            let t = PhaseTrig::new(theta);
            assert!((t.sin - theta.sin()).abs() < 1e-15);
            assert!((t.cos - theta.cos()).abs() < 1e-15);
            assert!((t.sin_half - (theta / 2.0).sin()).abs() < 1e-15);
            assert!((t.cos_half - (theta / 2.0).cos()).abs() < 1e-15);
        }
    }
}
