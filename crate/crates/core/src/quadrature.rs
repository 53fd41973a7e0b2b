//! Composite Gauss–Legendre quadrature with panel doubling.
//!
//! All integrands in this crate are smooth combinations of Gaussians, so a
//! fixed-order rule on uniformly refined panels converges geometrically. The
//! driver doubles the panel count until two successive estimates agree to the
//! requested relative tolerance.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes per panel.
const ORDER: usize = 8;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Nodes and weights of a composite rule on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub panels: usize,
}

impl CompositeRule {
    pub fn new(lo: f64, hi: f64, panels: usize) -> Self {
        let base = GaussLegendre::new(ORDER);
        let width = (hi - lo) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * ORDER);
        let mut weights = Vec::with_capacity(panels * ORDER);
        for p in 0..panels {
            let centre = lo + (p as f64 + 0.5) * width;
            for (x, w) in base.nodes().iter().zip(base.weights()) {
                nodes.push(centre + 0.5 * width * x);
                weights.push(0.5 * width * w);
            }
        }
        Self {
            nodes,
            weights,
            panels,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Refinement controls.
#[derive(Debug, Clone, Copy)]
pub struct Refinement {
    pub rel_tol: f64,
    /// Absolute floor below which two estimates are considered equal.
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-15,
            initial_panels: 8,
            max_panels: 1 << 20,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Converged<T> {
    pub value: T,
    pub panels: usize,
}

/// Doubles the panel count of a composite rule on `[lo, hi]` until the
/// vector-valued estimate returned by `eval` stabilises in every component.
pub fn refine<const N: usize, F>(
    lo: f64,
    hi: f64,
    control: Refinement,
    mut eval: F,
) -> Result<Converged<[f64; N]>>
where
    F: FnMut(&CompositeRule) -> [f64; N],
{
    let mut panels = control.initial_panels.max(1);
    let mut previous = eval(&CompositeRule::new(lo, hi, panels));
    let mut last = (previous, previous);
    while panels * 2 <= control.max_panels {
        panels *= 2;
        let current = eval(&CompositeRule::new(lo, hi, panels));
        let converged = previous.iter().zip(&current).all(|(p, c)| {
            let diff = (c - p).abs();
            diff <= control.abs_tol || diff <= control.rel_tol * c.abs()
        });
        if converged {
            return Ok(Converged {
                value: current,
                panels,
            });
        }
        last = (previous, current);
        previous = current;
    }
    let (p, c) = worst_component(&last.0, &last.1);
    Err(Error::QuadratureNonConvergence {
        previous: p,
        current: c,
        panels,
    })
}

fn worst_component<const N: usize>(a: &[f64; N], b: &[f64; N]) -> (f64, f64) {
    a.iter()
        .zip(b)
        .max_by(|x, y| (x.0 - x.1).abs().total_cmp(&(y.0 - y.1).abs()))
        .map(|(p, c)| (*p, *c))
        .unwrap_or((f64::NAN, f64::NAN))
}

/// Adaptive integral of a scalar function over `[lo, hi]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, control: Refinement) -> Result<f64> {
    refine::<1, _>(lo, hi, control, |rule| {
        let mut acc = crate::numeric::CompensatedSum::new();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            acc.add(w * f(*x));
        }
        [acc.value()]
    })
    .map(|c| c.value[0])
}
