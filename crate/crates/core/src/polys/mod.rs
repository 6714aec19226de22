//! One-dimensional orthogonal polynomial families.
//!
//! Each family is evaluated by extracting a coefficient from its
//! generating function with truncated power-series arithmetic. The
//! [`explicit`] submodule holds the terminating hypergeometric sums for
//! the same families; they share no code with the series path and are used
//! as a cross-check.

mod charlier;
mod dual_hahn;
pub mod explicit;
mod krawtchouk;
mod laguerre;
mod meixner;
mod recurrence;

pub use charlier::{charlier_eval, charlier_poly};
pub use dual_hahn::{dual_hahn_eval, dual_hahn_poly};
pub use krawtchouk::{
    krawtchouk_eval, krawtchouk_norm, krawtchouk_poly, krawtchouk_symmetric, KrawtchoukParams,
    TrialSequence,
};
pub use laguerre::{laguerre_eval, laguerre_poly};
pub use meixner::{
    default_truncation, meixner_eval, meixner_geometric_representation, meixner_poly,
};
pub use recurrence::{recurrence_eval, recurrence_values, recurrence_values_bounded};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameter record of a named family, validated at construction.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyParams<T> {
    Krawtchouk(KrawtchoukParams<T>),
    Meixner { a: T, q: T },
    PoissonCharlier { nu: T },
    Laguerre { beta: T },
    DualHahn { a: usize, b: usize, n: usize },
}

impl<T: Scalar> FamilyParams<T> {
    pub fn krawtchouk(n: usize, p: T) -> Result<Self> {
        Ok(Self::Krawtchouk(KrawtchoukParams::new(n, p)?))
    }

    pub fn meixner(a: T, q: T) -> Result<Self> {
        check_meixner(&a, &q)?;
        Ok(Self::Meixner { a, q })
    }

    pub fn poisson_charlier(nu: T) -> Result<Self> {
        if nu <= T::zero() {
            return Err(Error::domain(format!("nu = {nu} must be positive")));
        }
        Ok(Self::PoissonCharlier { nu })
    }

    pub fn laguerre(beta: T) -> Result<Self> {
        if beta <= T::zero() {
            return Err(Error::domain(format!("beta = {beta} must be positive")));
        }
        Ok(Self::Laguerre { beta })
    }

    pub fn dual_hahn(a: usize, b: usize, n: usize) -> Result<Self> {
        check_dual_hahn(a, b, n)?;
        Ok(Self::DualHahn { a, b, n })
    }

    /// Evaluates the degree-`n` member at `x`. For the dual Hahn family `x`
    /// is the integer index `z` of the argument `lambda(z)`.
    pub fn eval(&self, n: usize, x: &T) -> Result<T> {
        match self {
            Self::Krawtchouk(p) => {
                let xi = x
                    .to_usize_exact()
                    .ok_or_else(|| Error::domain(format!("Krawtchouk argument {x} is not an integer")))?;
                krawtchouk_eval(n, xi, p)
            }
            Self::Meixner { a, q } => meixner_eval(n, x, a, q),
            Self::PoissonCharlier { nu } => charlier_eval(n, x, nu),
            Self::Laguerre { beta } => laguerre_eval(n, x, beta),
            Self::DualHahn { a, b, n: big_n } => {
                let z = x
                    .to_usize_exact()
                    .ok_or_else(|| Error::domain(format!("dual Hahn index {x} is not an integer")))?;
                dual_hahn_eval(n, z, *a, *b, *big_n)
            }
        }
    }
}

pub(crate) fn check_meixner<T: Scalar>(a: &T, q: &T) -> Result<()> {
    if *a <= T::zero() {
        return Err(Error::domain(format!("Meixner shape a = {a} must be positive")));
    }
    if *q <= T::zero() || *q >= T::one() {
        return Err(Error::domain(format!("Meixner ratio q = {q} must lie in (0, 1)")));
    }
    Ok(())
}

pub(crate) fn check_dual_hahn(a: usize, b: usize, n: usize) -> Result<()> {
    if n == 0 || a < n || b < n {
        return Err(Error::domain(format!(
            "dual Hahn parameters need N >= 1 and a, b >= N (a={a}, b={b}, N={n})"
        )));
    }
    Ok(())
}
