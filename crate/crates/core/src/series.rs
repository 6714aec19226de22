//! Truncated power series in one variable and dense truncated polynomials
//! in several variables. Every generating function in the crate is a
//! product or power of low-degree series, so coefficients are extracted
//! with these two types rather than with symbolic algebra.

use std::collections::HashMap;
use std::sync::Arc;

use crate::scalar::Scalar;

/// Univariate series `c_0 + c_1 z + ... + c_order z^order`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> PowerSeries<T> {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(T::one(), order)
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `a + b z`, truncated at `order`.
    pub fn linear(a: T, b: T, order: usize) -> Self {
        let mut s = Self::constant(a, order);
        if order >= 1 {
            s.coeffs[1] = b;
        }
        s
    }

    /// Builds a series from explicit coefficients, padding or truncating to `order`.
    pub fn from_coeffs(mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.resize(order + 1, T::zero());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![T::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self { coeffs: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: (0..=order)
                .map(|k| self.coeffs[k].clone() + other.coeffs[k].clone())
                .collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn pow_int(&self, mut k: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// `exp(f)` for a series with zero constant term.
    pub fn exp(&self) -> Self {
        assert!(self.coeffs[0].is_zero(), "exp needs a zero constant term");
        let n = self.order();
        let mut g = vec![T::zero(); n + 1];
        g[0] = T::one();
        for m in 1..=n {
            let mut acc = T::zero();
            for k in 1..=m {
                acc = acc + T::from_usize(k) * self.coeffs[k].clone() * g[m - k].clone();
            }
            g[m] = acc / T::from_usize(m);
        }
        Self { coeffs: g }
    }

    /// `log(f)` for a series with constant term 1.
    pub fn ln(&self) -> Self {
        assert!(self.coeffs[0].is_one(), "log needs constant term 1");
        let n = self.order();
        let mut h = vec![T::zero(); n + 1];
        for m in 1..=n {
            let mut acc = self.coeffs[m].clone() * T::from_usize(m);
            for k in 1..m {
                acc = acc - T::from_usize(k) * h[k].clone() * self.coeffs[m - k].clone();
            }
            h[m] = acc / T::from_usize(m);
        }
        Self { coeffs: h }
    }

    /// `f^alpha` for a series with constant term 1 and arbitrary exponent.
    pub fn pow(&self, alpha: &T) -> Self {
        assert!(self.coeffs[0].is_one(), "pow needs constant term 1");
        let n = self.order();
        let mut g = vec![T::zero(); n + 1];
        g[0] = T::one();
        for m in 1..=n {
            let mut acc = T::zero();
            for k in 1..=m {
                let w = alpha.clone() * T::from_usize(k) - T::from_usize(m - k);
                acc = acc + w * self.coeffs[k].clone() * g[m - k].clone();
            }
            g[m] = acc / T::from_usize(m);
        }
        Self { coeffs: g }
    }

    /// Evaluates the truncated polynomial at `z`.
    pub fn eval(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
    }
}

/// Exponent vectors of total degree at most `max_degree` in `nvars`
/// variables, in graded lexicographic order.
#[derive(Debug)]
pub struct MonomialSpace {
    nvars: usize,
    max_degree: usize,
    exps: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    /// `up[i][v]` is the index of `exps[i] + e_v`, if still within the degree bound.
    up: Vec<Vec<Option<usize>>>,
}

impl MonomialSpace {
    pub fn new(nvars: usize, max_degree: usize) -> Arc<Self> {
        let exps = crate::combinatorics::bounded_indices(nvars, max_degree);
        let index: HashMap<Vec<usize>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let up = exps
            .iter()
            .map(|e| {
                (0..nvars)
                    .map(|v| {
                        let mut f = e.clone();
                        f[v] += 1;
                        index.get(&f).copied()
                    })
                    .collect()
            })
            .collect();
        Arc::new(Self {
            nvars,
            max_degree,
            exps,
            index,
            up,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<usize>] {
        &self.exps
    }

    pub fn index_of(&self, e: &[usize]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

/// Dense multivariate polynomial truncated at a total degree.
#[derive(Clone, Debug)]
pub struct MultiSeries<T> {
    space: Arc<MonomialSpace>,
    coeffs: Vec<T>,
}

impl<T: Scalar> MultiSeries<T> {
    pub fn one(space: Arc<MonomialSpace>) -> Self {
        let mut coeffs = vec![T::zero(); space.len()];
        coeffs[0] = T::one();
        Self { space, coeffs }
    }

    pub fn space(&self) -> &Arc<MonomialSpace> {
        &self.space
    }

    pub fn coeff(&self, e: &[usize]) -> T {
        self.space
            .index_of(e)
            .map(|i| self.coeffs[i].clone())
            .unwrap_or_else(T::zero)
    }

    /// Iterates over `(exponent, coefficient)` pairs in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &T)> {
        self.space
            .exps
            .iter()
            .map(|e| e.as_slice())
            .zip(self.coeffs.iter())
    }

    /// Multiplies in place by `c0 + sum_v lin[v] * w_v`.
    pub fn mul_linear(&mut self, c0: &T, lin: &[T]) {
        debug_assert_eq!(lin.len(), self.space.nvars);
        let mut out = vec![T::zero(); self.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !c0.is_zero() {
                out[i] = out[i].clone() + a.clone() * c0.clone();
            }
            for (v, l) in lin.iter().enumerate() {
                if l.is_zero() {
                    continue;
                }
                if let Some(j) = self.space.up[i][v] {
                    out[j] = out[j].clone() + a.clone() * l.clone();
                }
            }
        }
        self.coeffs = out;
    }

    /// Multiplies in place by `(c0 + sum_v lin[v] * w_v)^k`.
    pub fn mul_linear_pow(&mut self, c0: &T, lin: &[T], k: usize) {
        for _ in 0..k {
            self.mul_linear(c0, lin);
        }
    }
}
