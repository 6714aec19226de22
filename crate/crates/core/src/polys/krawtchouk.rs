use crate::combinatorics::{binomial, elementary_symmetric, factorial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::PowerSeries;

/// Binomial `(N, p)` parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct KrawtchoukParams<T> {
    n: usize,
    p: T,
    q: T,
}

impl<T: Scalar> KrawtchoukParams<T> {
    pub fn new(n: usize, p: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("number of trials N must be positive"));
        }
        if p <= T::zero() || p >= T::one() {
            return Err(Error::domain(format!("p = {p} must lie in (0, 1)")));
        }
        let q = T::one() - p.clone();
        Ok(Self { n, p, q })
    }

    pub fn trials(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn q(&self) -> &T {
        &self.q
    }
}

/// A finite run of Bernoulli trials `xi_i in {0, 1}` with success probability `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialSequence<T> {
    xi: Vec<u8>,
    p: T,
}

impl<T: Scalar> TrialSequence<T> {
    pub fn new(xi: Vec<u8>, p: T) -> Result<Self> {
        if let Some(pos) = xi.iter().position(|&v| v > 1) {
            return Err(Error::domain(format!("trial {pos} is {} (must be 0 or 1)", xi[pos])));
        }
        if p <= T::zero() || p >= T::one() {
            return Err(Error::domain(format!("p = {p} must lie in (0, 1)")));
        }
        Ok(Self { xi, p })
    }

    pub fn outcomes(&self) -> &[u8] {
        &self.xi
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn successes(&self) -> usize {
        self.xi.iter().map(|&v| v as usize).sum()
    }

    /// Number of failures before the first success, if any success occurs.
    pub fn first_success(&self) -> Option<usize> {
        self.xi.iter().position(|&v| v == 1)
    }
}

/// `K_n(x; N, p) = n! [z^n] (1 + q z)^x (1 - p z)^(N - x)`.
pub fn krawtchouk_eval<T: Scalar>(n: usize, x: usize, params: &KrawtchoukParams<T>) -> Result<T> {
    if n > params.n {
        return Err(Error::domain(format!("degree {n} exceeds N = {}", params.n)));
    }
    if x > params.n {
        return Err(Error::domain(format!("argument {x} exceeds N = {}", params.n)));
    }
    let up = PowerSeries::linear(T::one(), params.q.clone(), n).pow_int(x);
    let down = PowerSeries::linear(T::one(), -params.p.clone(), n).pow_int(params.n - x);
    Ok(up.mul(&down).coeff(n) * factorial::<T>(n))
}

/// The same polynomial at an arbitrary argument (generalised binomial powers).
pub fn krawtchouk_poly<T: Scalar>(n: usize, x: &T, params: &KrawtchoukParams<T>) -> T {
    let up = PowerSeries::linear(T::one(), params.q.clone(), n).pow(x);
    let rest = T::from_usize(params.n) - x.clone();
    let down = PowerSeries::linear(T::one(), -params.p.clone(), n).pow(&rest);
    up.mul(&down).coeff(n) * factorial::<T>(n)
}

/// `n!^2 C(N, n) (pq)^n`.
pub fn krawtchouk_norm<T: Scalar>(n: usize, params: &KrawtchoukParams<T>) -> Result<T> {
    if n > params.n {
        return Err(Error::domain(format!("degree {n} exceeds N = {}", params.n)));
    }
    let f = factorial::<T>(n);
    let pq = params.p.clone() * params.q.clone();
    Ok(f.clone() * f * binomial::<T>(params.n, n) * pq.powi(n as i32))
}

/// `n! e_n(xi_1 - p, ..., xi_N - p)`, which equals `K_n(sum xi; N, p)`.
pub fn krawtchouk_symmetric<T: Scalar>(n: usize, trials: &TrialSequence<T>) -> Result<T> {
    if n > trials.len() {
        return Err(Error::domain(format!(
            "degree {n} exceeds the number of trials {}",
            trials.len()
        )));
    }
    let centred: Vec<T> = trials
        .xi
        .iter()
        .map(|&v| T::from_usize(v as usize) - trials.p.clone())
        .collect();
    let e = elementary_symmetric(&centred, n);
    Ok(e[n].clone() * factorial::<T>(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn params(n: usize, p: Rational) -> KrawtchoukParams<Rational> {
        KrawtchoukParams::new(n, p).unwrap()
    }

    #[test]
    fn spec_examples() {
        let half4 = params(4, rat(1, 2));
        for x in 0..=4 {
            assert_eq!(krawtchouk_eval(0, x, &half4).unwrap(), rat(1, 1));
        }
        assert_eq!(krawtchouk_eval(1, 2, &half4).unwrap(), rat(0, 1));
        assert_eq!(krawtchouk_eval(2, 1, &params(2, rat(1, 2))).unwrap(), rat(-1, 2));
    }

    #[test]
    fn norms_match_brute_force_values() {
        // Frozen from an exact brute-force sum over x with Fractions.
        assert_eq!(krawtchouk_norm(0, &params(4, rat(1, 2))).unwrap(), rat(1, 1));
        assert_eq!(krawtchouk_norm(2, &params(4, rat(1, 2))).unwrap(), rat(3, 2));
        assert_eq!(krawtchouk_norm(3, &params(3, rat(1, 3))).unwrap(), rat(32, 81));
    }

    #[test]
    fn out_of_range_is_a_domain_error() {
        let p = params(3, rat(1, 3));
        assert!(matches!(krawtchouk_eval(4, 0, &p), Err(Error::Domain(_))));
        assert!(matches!(krawtchouk_eval(1, 4, &p), Err(Error::Domain(_))));
        assert!(krawtchouk_norm(4, &p).is_err());
        assert!(KrawtchoukParams::new(3, rat(1, 1)).is_err());
    }

    #[test]
    fn symmetric_examples() {
        let t = TrialSequence::new(vec![1, 0], rat(1, 2)).unwrap();
        assert_eq!(krawtchouk_symmetric(0, &t).unwrap(), rat(1, 1));
        assert_eq!(krawtchouk_symmetric(1, &t).unwrap(), rat(0, 1));
        assert_eq!(krawtchouk_symmetric(2, &t).unwrap(), rat(-1, 2));
        assert!(TrialSequence::new(vec![2], rat(1, 2)).is_err());
    }

    #[test]
    fn general_argument_agrees_at_integers() {
        let p = params(5, rat(2, 7));
        for n in 0..=5 {
            for x in 0..=5 {
                assert_eq!(
                    krawtchouk_poly(n, &rat(x as i64, 1), &p),
                    krawtchouk_eval(n, x, &p).unwrap()
                );
            }
        }
    }

    #[test]
    fn krawtchouk_is_monic() {
        // K_n itself has leading coefficient 1 in x.
        let p = params(6, rat(1, 3));
        for n in 0..=6usize {
            let xs: Vec<Rational> = (0..=n as i64).map(|x| rat(x, 1)).collect();
            let ys: Vec<Rational> = (0..=n).map(|x| krawtchouk_eval(n, x, &p).unwrap()).collect();
            let c = crate::linalg::interpolate_univariate(&xs, &ys).unwrap();
            assert_eq!(c[n], rat(1, 1), "degree {n}");
        }
    }
}
