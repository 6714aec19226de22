use crate::combinatorics::{factorial, rising};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::check_dual_hahn;

/// `R_n(lambda(z); a, b, N) = 3F2(-n, -z, z-a-b-1; -a, -N; 1)`.
pub fn dual_hahn_eval<T: Scalar>(n: usize, z: usize, a: usize, b: usize, big_n: usize) -> Result<T> {
    check_dual_hahn(a, b, big_n)?;
    if n > big_n {
        return Err(Error::domain(format!("degree {n} exceeds N = {big_n}")));
    }
    if z > big_n {
        return Err(Error::domain(format!("index {z} exceeds N = {big_n}")));
    }
    let zeta = T::from_usize(z * (a + b + 1 - z));
    Ok(dual_hahn_poly(n, &zeta, a, b, big_n))
}

/// `R_n` as a polynomial in `zeta = z (a + b + 1 - z)`. Each factor of
/// `(-z)_k (z-a-b-1)_k` equals `zeta + i (i - a - b - 1)`.
pub fn dual_hahn_poly<T: Scalar>(n: usize, zeta: &T, a: usize, b: usize, big_n: usize) -> T {
    let s = (a + b + 1) as i64;
    let minus_n = T::from_i64(-(n as i64));
    let minus_a = T::from_i64(-(a as i64));
    let minus_big = T::from_i64(-(big_n as i64));
    let mut total = T::one();
    let mut prod = T::one();
    for k in 1..=n {
        let i = (k - 1) as i64;
        prod = prod * (zeta.clone() + T::from_i64(i * (i - s)));
        let term = rising(&minus_n, k) * prod.clone()
            / (rising(&minus_a, k) * rising(&minus_big, k) * factorial::<T>(k));
        total = total + term;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn spec_examples() {
        for z in 0..=3 {
            assert_eq!(dual_hahn_eval::<Rational>(0, z, 4, 5, 3).unwrap(), rat(1, 1));
        }
        for n in 0..=3 {
            assert_eq!(dual_hahn_eval::<Rational>(n, 0, 4, 5, 3).unwrap(), rat(1, 1));
        }
        assert_eq!(dual_hahn_eval::<Rational>(1, 1, 2, 2, 2).unwrap(), rat(0, 1));
        assert!(dual_hahn_eval::<Rational>(3, 0, 2, 2, 2).is_err());
    }

    #[test]
    fn two_urn_values() {
        // a=4, b=5, N=3, z=1: values from the recurrence at zeta = 9.
        let v: Vec<Rational> = (0..=3).map(|n| dual_hahn_eval(n, 1, 4, 5, 3).unwrap()).collect();
        assert_eq!(v, vec![rat(1, 1), rat(1, 4), rat(-1, 2), rat(-5, 4)]);
    }
}
