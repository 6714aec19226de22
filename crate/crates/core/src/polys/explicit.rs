//! Terminating hypergeometric sums for the one-dimensional families.

use crate::combinatorics::{binomial, binomial_general, factorial, falling, rising};
use crate::scalar::Scalar;

/// `n! sum_k C(x, k) q^k C(N - x, n - k) (-p)^(n - k)`.
pub fn krawtchouk<T: Scalar>(n: usize, x: usize, big_n: usize, p: &T) -> T {
    let q = T::one() - p.clone();
    let mp = -p.clone();
    let mut s = T::zero();
    for k in 0..=n.min(x) {
        if n - k > big_n - x {
            continue;
        }
        s = s + binomial::<T>(x, k)
            * q.powi(k as i32)
            * binomial::<T>(big_n - x, n - k)
            * mp.powi((n - k) as i32);
    }
    s * factorial::<T>(n)
}

/// `2F1(-n, -x; a; 1 - 1/q)`.
pub fn meixner<T: Scalar>(n: usize, x: &T, a: &T, q: &T) -> T {
    let arg = T::one() - T::one() / q.clone();
    let mn = T::from_i64(-(n as i64));
    let mx = -x.clone();
    (0..=n).fold(T::zero(), |acc, k| {
        acc + rising(&mn, k) * rising(&mx, k) / (rising(a, k) * factorial::<T>(k))
            * arg.powi(k as i32)
    })
}

/// `sum_k C(n, k) (-1/nu)^k x (x-1) ... (x-k+1)`.
pub fn charlier<T: Scalar>(n: usize, x: &T, nu: &T) -> T {
    let r = -(T::one() / nu.clone());
    (0..=n).fold(T::zero(), |acc, k| {
        acc + binomial::<T>(n, k) * r.powi(k as i32) * falling(x, k)
    })
}

/// `sum_k C(n + beta - 1, n - k) x^k / k!`.
pub fn laguerre<T: Scalar>(n: usize, x: &T, beta: &T) -> T {
    let top = T::from_usize(n) + beta.clone() - T::one();
    (0..=n).fold(T::zero(), |acc, k| {
        acc + binomial_general(&top, n - k) * x.powi(k as i32) / factorial::<T>(k)
    })
}

/// `3F2(-n, -z, z - a - b - 1; -a, -N; 1)` summed over `k <= min(n, z)`.
pub fn dual_hahn<T: Scalar>(n: usize, z: usize, a: usize, b: usize, big_n: usize) -> T {
    let c = |v: i64| T::from_i64(v);
    let (n_, z_, a_, b_, nn) = (n as i64, z as i64, a as i64, b as i64, big_n as i64);
    (0..=n.min(z)).fold(T::zero(), |acc, k| {
        acc + rising(&c(-n_), k) * rising(&c(-z_), k) * rising(&c(z_ - a_ - b_ - 1), k)
            / (rising(&c(-a_), k) * rising(&c(-nn), k) * factorial::<T>(k))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polys;
    use crate::scalar::{rat, Rational};

    #[test]
    fn explicit_sums_agree_with_series() {
        let p = rat(2, 7);
        let kp = polys::KrawtchoukParams::new(6, p.clone()).unwrap();
        for n in 0..=6 {
            for x in 0..=6 {
                assert_eq!(krawtchouk(n, x, 6, &p), polys::krawtchouk_eval(n, x, &kp).unwrap());
            }
        }
        let (a, q, nu, beta) = (rat(5, 2), rat(1, 3), rat(4, 3), rat(7, 4));
        for n in 0..=6 {
            for x in 0..=5 {
                let xr = rat(x, 1);
                assert_eq!(meixner(n, &xr, &a, &q), polys::meixner_eval(n, &xr, &a, &q).unwrap());
                assert_eq!(charlier(n, &xr, &nu), polys::charlier_eval(n, &xr, &nu).unwrap());
                let xh = rat(x, 3);
                assert_eq!(laguerre(n, &xh, &beta), polys::laguerre_eval(n, &xh, &beta).unwrap());
            }
        }
        for n in 0..=4 {
            for z in 0..=4 {
                assert_eq!(
                    dual_hahn::<Rational>(n, z, 5, 6, 4),
                    polys::dual_hahn_eval(n, z, 5, 6, 4).unwrap()
                );
            }
        }
    }
}
