//! Gauss-Legendre rules built by Newton iteration on the roots of `P_n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::orthopoly::legendre_with_derivatives;

/// Newton steps allowed per root before giving up.
pub const MAX_NEWTON_STEPS: usize = 100;
/// Convergence threshold on the Newton correction.
pub const NEWTON_TOLERANCE: f64 = 1e-15;

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interval: (f64, f64),
}

impl QuadratureRule {
    /// Nodes in ascending order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `sum_i w_i values_i` for values tabulated at the nodes.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                found: values.len(),
                context: "values tabulated at quadrature nodes",
            });
        }
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }

    /// Integrates a closure sampled at the nodes.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| w * f(x))
            .sum()
    }
}

/// Builds the `n`-point Gauss-Legendre rule on `[a, b]`.
///
/// Roots of `P_n` start from `cos(pi (i - 1/4) / (n + 1/2))` and are polished
/// by Newton's method until the correction drops below
/// [`NEWTON_TOLERANCE`]. Weights use the closed form
/// `w_i = (b - a) / ((1 - z_i^2) P_n'(z_i)^2)`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidInput("quadrature order must be >= 1".into()));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInput(format!(
            "quadrature interval needs a < b, got [{a}, {b}]"
        )));
    }
    let half_sum = 0.5 * (a + b);
    let half_len = 0.5 * (b - a);
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];

    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..MAX_NEWTON_STEPS {
            let [p, dp, _, _] = legendre_with_derivatives(n, z);
            let step = p / dp;
            z -= step;
            if step.abs() < NEWTON_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::QuadratureNonConvergence {
                order: n,
                index: i,
                iterations: MAX_NEWTON_STEPS,
            });
        }
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        }
        let dp = legendre_with_derivatives(n, z)[1];
        let w = (b - a) / ((1.0 - z * z) * dp * dp);
        nodes[i] = half_sum - half_len * z;
        nodes[n - 1 - i] = half_sum + half_len * z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }

    Ok(QuadratureRule {
        nodes,
        weights,
        interval: (a, b),
    })
}
