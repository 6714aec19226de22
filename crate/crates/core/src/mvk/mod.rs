//! Multivariate Krawtchouk polynomials on the multinomial distribution.
//!
//! Categories are indexed `0..d` in code (the first category is `j = 0`),
//! basis functions `u^(0) = 1, u^(1), ..., u^(d-1)` by `l = 0..d`, and a
//! degree vector `n` of length `d - 1` stores `n_1, ..., n_{d-1}`; the
//! derived `n_0 = N - |n|` is never stored.

mod basis;
mod dual;
pub(crate) mod eval;
mod kernel;
mod recurrence;
mod structure;

pub use basis::{basis_orthonormal_from, Basis, BasisRecord};
pub use dual::{dual_basis, duality_residual, DualBasis};
pub use eval::{
    dual_explicit, dual_gf_coefficients, mvk_dual_gram, mvk_eval, mvk_eval_explicit,
    mvk_eval_table, mvk_gram, mvk_transform, mvk_transform_bruteforce, table_series, PolyTable,
};
pub use kernel::{kernel_matrix, reproducing_kernel};
pub use recurrence::{c_tensor, mvk_recurrence_residual, RecurrenceKind};
pub use structure::{
    kappa_statistics, leading_term_check, linear_statistics, LeadingTermReport, StructureMode,
};

use crate::combinatorics::{bounded_indices, compositions, multinomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Degree vector `(n_1, ..., n_{d-1})` with `|n| <= N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    n: Vec<usize>,
    total: usize,
}

impl MultiIndex {
    pub fn new(n: Vec<usize>, total: usize) -> Result<Self> {
        let deg: usize = n.iter().sum();
        if deg > total {
            return Err(Error::domain(format!("|n| = {deg} exceeds N = {total}")));
        }
        Ok(Self { n, total })
    }

    pub fn zero(len: usize, total: usize) -> Self {
        Self {
            n: vec![0; len],
            total,
        }
    }

    /// All indices of length `len` with `|n| <= total`, graded order.
    pub fn all(len: usize, total: usize) -> Vec<Self> {
        bounded_indices(len, total)
            .into_iter()
            .map(|n| Self { n, total })
            .collect()
    }

    /// All indices with `|n| = degree`.
    pub fn of_degree(len: usize, total: usize, degree: usize) -> Vec<Self> {
        compositions(degree, len)
            .into_iter()
            .map(|n| Self { n, total })
            .collect()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.n
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn degree(&self) -> usize {
        self.n.iter().sum()
    }

    pub fn n0(&self) -> usize {
        self.total - self.degree()
    }

    /// `n+ = (n_0, n_1, ..., n_{d-1})`.
    pub fn plus(&self) -> Vec<usize> {
        let mut v = Vec::with_capacity(self.n.len() + 1);
        v.push(self.n0());
        v.extend_from_slice(&self.n);
        v
    }

    /// Multinomial coefficient over `n+`.
    pub fn multinomial<T: Scalar>(&self) -> T {
        multinomial(&self.plus())
    }
}

/// Occupancy vector `x` with `|x| = N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(x: Vec<usize>) -> Self {
        Self(x)
    }

    /// All compositions of `total` into `parts` categories, lexicographic order.
    pub fn all(total: usize, parts: usize) -> Vec<Self> {
        compositions(total, parts).into_iter().map(Self).collect()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `x - e_from + e_to`, or `None` when `x_from = 0`.
    pub fn moved(&self, from: usize, to: usize) -> Option<Self> {
        if self.0[from] == 0 {
            return None;
        }
        let mut y = self.0.clone();
        y[from] -= 1;
        y[to] += 1;
        Some(Self(y))
    }

    /// `m(x; p) = C(N; x) prod p_j^x_j`.
    pub fn multinomial_mass<T: Scalar>(&self, p: &[T]) -> T {
        self.0
            .iter()
            .zip(p)
            .fold(multinomial::<T>(&self.0), |acc, (&k, pj)| acc * pj.powi(k as i32))
    }
}

impl std::fmt::Display for Composition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
