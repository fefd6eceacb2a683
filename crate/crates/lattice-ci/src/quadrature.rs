//! Gauss-Legendre quadrature.
//!
//! Nodes are the roots of the Legendre polynomial P_m, found by Newton
//! iteration from the Chebyshev-like initial guesses; weights follow from
//! the derivative. A rule of degree m integrates polynomials of degree
//! 2m - 1 exactly.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// P_m(x) and P'_m(x) by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    /// Rule with m >= 2 nodes on [-1, 1].
    pub fn new(m: usize) -> Self {
        assert!(m >= 2, "need at least 2 quadrature nodes");
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 1..=m.div_ceil(2) {
            let mut x = (PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // roots come out largest first; store symmetric pairs
            nodes[i - 1] = -x;
            nodes[m - i] = x;
            weights[i - 1] = w;
            weights[m - i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Integral of f over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let scale = 0.5 * (b - a);
        let shift = 0.5 * (a + b);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(scale * x + shift))
            .sum();
        scale * sum
    }
}
