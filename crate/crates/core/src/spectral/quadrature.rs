use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Gauss rule for the gamma weight `y^alpha e^(-y) / Gamma(alpha + 1)` on
/// `(0, inf)`; weights sum to 1.
#[derive(Clone, Debug)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Golub-Welsch: eigen-decomposition of the Jacobi matrix.
    pub fn new(count: usize, alpha: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::domain("quadrature needs at least one node"));
        }
        if !(alpha > -1.0) {
            return Err(Error::domain(format!("alpha = {alpha} must exceed -1")));
        }
        let mut jacobi = DMatrix::<f64>::zeros(count, count);
        for k in 0..count {
            jacobi[(k, k)] = 2.0 * k as f64 + alpha + 1.0;
            if k + 1 < count {
                let kk = (k + 1) as f64;
                let off = (kk * (kk + alpha)).sqrt();
                jacobi[(k, k + 1)] = off;
                jacobi[(k + 1, k)] = off;
            }
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        // Small weights from eigenvector components only carry absolute
        // accuracy; polish each node by Newton and take the Christoffel number
        // 1 / sum p_m(x)^2 over orthonormal p_m instead.
        let weights = nodes
            .iter_mut()
            .map(|x| {
                for _ in 0..3 {
                    let (p, dp, _) = orthonormal(count, alpha, *x);
                    if dp != 0.0 {
                        *x -= p / dp;
                    }
                }
                1.0 / orthonormal(count, alpha, *x).2
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `(p_n(x), p_n'(x), sum_{m<n} p_m(x)^2)` for the orthonormal Laguerre family.
fn orthonormal(n: usize, alpha: f64, x: f64) -> (f64, f64, f64) {
    let (mut p0, mut p1) = (0.0, 1.0);
    let (mut d0, mut d1) = (0.0, 0.0);
    let mut sum = 0.0;
    let mut b_prev = 0.0;
    for m in 0..n {
        sum += p1 * p1;
        let a = 2.0 * m as f64 + alpha + 1.0;
        let b = ((m as f64 + 1.0) * (m as f64 + 1.0 + alpha)).sqrt();
        let p2 = ((x - a) * p1 - b_prev * p0) / b;
        let d2 = ((x - a) * d1 + p1 - b_prev * d0) / b;
        (p0, p1, d0, d1, b_prev) = (p1, p2, d1, d2, b);
    }
    (p1, d1, sum)
}
