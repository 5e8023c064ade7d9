//! Generalized Gauss-Laguerre rule for the weight x^alpha e^{-x} on [0, inf).
//!
//! Golub-Welsch supplies starting nodes, each node is then polished by Newton
//! on the three-term recurrence, and weights come from the derivative formula
//! evaluated in logarithms.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes and weights of an n-point rule.
#[derive(Debug, Clone, PartialEq)]
pub struct LaguerreRule {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    /// Natural logarithms of the weights; the weights themselves underflow
    /// for large n.
    pub ln_weights: Vec<f64>,
}

// Returns (L_n(x), L_{n-1}(x)) for the generalized Laguerre polynomials.
fn laguerre_pair(n: usize, alpha: f64, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    if n == 0 {
        return (prev, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

impl LaguerreRule {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("Laguerre rule needs at least one node".into()));
        }
        if !(alpha > -1.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("Laguerre exponent {alpha} must exceed -1")));
        }
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            jacobi[(k, k)] = 2.0 * k as f64 + alpha + 1.0;
            if k + 1 < n {
                let b = ((k as f64 + 1.0) * (k as f64 + 1.0 + alpha)).sqrt();
                jacobi[(k, k + 1)] = b;
                jacobi[(k + 1, k)] = b;
            }
        }
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);

        let nf = n as f64;
        let ln_norm = libm::lgamma(nf + alpha + 1.0) - libm::lgamma(nf + 1.0);
        let mut ln_weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            for _ in 0..8 {
                let (ln, lnm1) = laguerre_pair(n, alpha, *x);
                let d = (nf * ln - (nf + alpha) * lnm1) / *x;
                let step = ln / d;
                *x -= step;
                if step.abs() <= 1e-16 * x.abs() {
                    break;
                }
            }
            let (ln, lnm1) = laguerre_pair(n, alpha, *x);
            let d = (nf * ln - (nf + alpha) * lnm1) / *x;
            ln_weights.push(ln_norm - x.ln() - 2.0 * d.abs().ln());
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) || nodes[0] <= 0.0 {
            return Err(Error::Singular("Laguerre nodes failed to separate".into()));
        }
        Ok(Self {
            alpha,
            nodes,
            ln_weights,
        })
    }

    /// Applies the rule to g, approximating the integral of x^alpha e^{-x} g(x).
    pub fn apply<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.ln_weights)
            .map(|(&x, &lw)| lw.exp() * g(x))
            .sum()
    }
}
