//! Product quadrature for the uniform probability measure on SO(3):
//! Gauss-Legendre in `cos(alpha)`, uniform (trapezoid on the periodic
//! interval) in `beta` and `gamma`, with weights summing to one.

use crate::tensor::{EulerAngles, Rotation};
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]` via Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev initial guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature node: rotation plus probability weight.
pub struct So3Node {
    pub rotation: Rotation,
    pub weight: f64,
}

/// Quadrature resolution: `n_alpha` Gauss-Legendre nodes in `cos(alpha)` and
/// `n_beta`, `n_gamma` uniform nodes in the periodic angles.
#[derive(Debug, Clone, Copy)]
pub struct So3Grid {
    pub n_alpha: usize,
    pub n_beta: usize,
    pub n_gamma: usize,
}

impl So3Grid {
    /// Resolution used by the moment-matching solver; adequate for order-2
    /// exponents with multiplier norms up to ~30 (checked by the refinement
    /// test).
    pub fn default_entropy() -> Self {
        So3Grid {
            n_alpha: 32,
            n_beta: 64,
            n_gamma: 64,
        }
    }

    pub fn doubled(&self) -> Self {
        So3Grid {
            n_alpha: 2 * self.n_alpha,
            n_beta: 2 * self.n_beta,
            n_gamma: 2 * self.n_gamma,
        }
    }

    pub fn nodes(&self) -> Vec<So3Node> {
        let (u, wu) = gauss_legendre(self.n_alpha);
        let mut out = Vec::with_capacity(self.n_alpha * self.n_beta * self.n_gamma);
        let wb = 1.0 / self.n_beta as f64;
        let wg = 1.0 / self.n_gamma as f64;
        for (ui, wui) in u.iter().zip(&wu) {
            let alpha = ui.clamp(-1.0, 1.0).acos();
            for ib in 0..self.n_beta {
                let beta = 2.0 * PI * ib as f64 / self.n_beta as f64;
                for ig in 0..self.n_gamma {
                    let gamma = 2.0 * PI * ig as f64 / self.n_gamma as f64;
                    out.push(So3Node {
                        rotation: Rotation::from_euler(EulerAngles::new(alpha, beta, gamma)),
                        weight: 0.5 * wui * wb * wg,
                    });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // degree up to 2*8-1
        for deg in 0..16 {
            let integral: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg)).sum();
            let exact = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            assert_abs_diff_eq!(integral, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn weights_are_a_probability_measure() {
        let grid = So3Grid {
            n_alpha: 8,
            n_beta: 12,
            n_gamma: 12,
        };
        let total: f64 = grid.nodes().iter().map(|n| n.weight).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn second_moments_of_uniform_measure() {
        // <(e_i . m_j)^2> = 1/3 under the uniform measure
        let grid = So3Grid {
            n_alpha: 8,
            n_beta: 16,
            n_gamma: 16,
        };
        for i in 0..3 {
            for j in 0..3 {
                let m: f64 = grid
                    .nodes()
                    .iter()
                    .map(|n| n.weight * n.rotation.entry(i, j).powi(2))
                    .sum();
                assert_abs_diff_eq!(m, 1.0 / 3.0, epsilon = 1e-12);
            }
        }
    }
}
