//! Gauss–Laguerre rule for integrals of the form `∫_0^∞ f(x) e^{-x} dx`.

use crate::{Error, Result};

/// Nodes and weights of an `n`-point Gauss–Laguerre rule (weight `e^{-x}`).
/// Exact for polynomials of degree up to `2n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Newton iteration on `L_n` from asymptotic starting guesses.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 512 {
            return Err(Error::InvalidGrid(format!("quadrature needs 1..=512 nodes, got {n}")));
        }
        let nf = n as f64;
        let mut nodes: Vec<f64> = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut z = 0.0_f64;
        for i in 0..n {
            z = match i {
                0 => 3.0 / (1.0 + 2.4 * nf),
                1 => z + 15.0 / (1.0 + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
                }
            };
            let mut converged = false;
            let (mut p2, mut dp) = (0.0, 0.0);
            let mut polish = 2;
            for _ in 0..100 {
                // L_n(z) and L_{n-1}(z) by the three-term recurrence
                let mut p1 = 1.0;
                p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
                }
                dp = (nf * p1 - nf * p2) / z;
                let z_prev = z;
                z = z_prev - p1 / dp;
                // Roundoff keeps |dz| from reaching zero; take two more steps
                // once it is small.
                if converged || (z - z_prev).abs() <= 1e-12 * z.abs().max(1.0) {
                    converged = true;
                    polish -= 1;
                    if polish == 0 {
                        break;
                    }
                }
            }
            if !converged {
                return Err(Error::InvalidGrid(format!("Laguerre root {i} of {n} did not converge")));
            }
            nodes.push(z);
            weights.push(-1.0 / (dp * nf * p2));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_0^∞ f(x) e^{-x} dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `∫_a^∞ f(x) e^{-x} dx = e^{-a} ∫_0^∞ f(a + y) e^{-y} dy`.
    pub fn integrate_from<F: Fn(f64) -> f64>(&self, a: f64, f: F) -> f64 {
        if a == f64::INFINITY {
            return 0.0;
        }
        (-a).exp() * self.integrate(|y| f(a + y))
    }
}
