use crate::combinatorics::{binomial, factorial, rising};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::PowerSeries;

use super::{check_meixner, krawtchouk_eval, KrawtchoukParams, TrialSequence};

/// `M_n(x; a, q)`, normalised so that `M_n(0) = 1`:
/// `sum_n M_n(x) (a)_n / n! z^n = (1 - z/q)^x (1 - z)^(-x-a)`.
pub fn meixner_eval<T: Scalar>(n: usize, x: &T, a: &T, q: &T) -> Result<T> {
    check_meixner(a, q)?;
    if *x < T::zero() {
        return Err(Error::domain(format!("Meixner argument {x} is negative")));
    }
    Ok(meixner_poly(n, x, a, q))
}

/// Same as [`meixner_eval`] without the argument-range check.
pub fn meixner_poly<T: Scalar>(n: usize, x: &T, a: &T, q: &T) -> T {
    let left = PowerSeries::linear(T::one(), -(T::one() / q.clone()), n).pow(x);
    let right = PowerSeries::linear(T::one(), -T::one(), n).pow(&(-(x.clone() + a.clone())));
    left.mul(&right).coeff(n) * factorial::<T>(n) / rising(a, n)
}

/// Smallest `L >= n` with `q^(L-n) C(L, n) < tol`.
pub fn default_truncation(n: usize, q: f64, tol: f64) -> usize {
    let mut l = n.max(1);
    loop {
        let bound = q.powi((l - n) as i32) * binomial::<f64>(l, n);
        if bound < tol || l > 100_000 {
            return l;
        }
        l += 1;
    }
}

/// Evaluates `M_n(X; 1, q)` from a Bernoulli trial sequence, where `X` is
/// the number of failures before the first success, through the double sum
///
/// `sum_{l=1}^{L} sum_{r=1}^{l} K_{r-1}(X_{l-1}; l-1, p) / (r-1)! (xi_l - p)
///  (-1)^(r-1) q^(l-r-1) M_{n-1}(l-1; 1, q)`
///
/// with `X_{l-1}` the number of successes among the first `l-1` trials.
/// Every block with `l > X + 1` vanishes, so only the prefix up to the first
/// success is needed.
pub fn meixner_geometric_representation<T: Scalar>(
    n: usize,
    trials: &TrialSequence<T>,
    truncation: usize,
) -> Result<T> {
    if n == 0 {
        return Err(Error::domain("the representation needs n >= 1"));
    }
    let window = truncation.min(trials.len());
    let first = trials.outcomes()[..window]
        .iter()
        .position(|&v| v == 1)
        .ok_or_else(|| {
            Error::Truncation(format!("no success among the first {window} trials"))
        })?;
    let p = trials.p().clone();
    let q = T::one() - p.clone();
    let one = T::one();
    let mut total = T::zero();
    let mut successes = 0usize;
    for l in 1..=window {
        let xi = trials.outcomes()[l - 1];
        // Blocks past the first success are identically zero.
        if l <= first + 1 {
            let centred = T::from_usize(xi as usize) - p.clone();
            let m = meixner_poly(n - 1, &T::from_usize(l - 1), &one, &q);
            let mut inner = T::zero();
            for r in 1..=l {
                let k = if l == 1 {
                    T::one()
                } else {
                    krawtchouk_eval(r - 1, successes, &KrawtchoukParams::new(l - 1, p.clone())?)?
                };
                let sign = if (r - 1) % 2 == 0 { T::one() } else { -T::one() };
                let qpow = q.powi(l as i32 - r as i32 - 1);
                inner = inner + k / factorial::<T>(r - 1) * sign * qpow;
            }
            total = total + inner * centred * m;
        }
        successes += xi as usize;
    }
    Ok(total)
}
