use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::PowerSeries;

/// `L_n^(beta-1)(x)` under the generating function
/// `sum_n L_n z^n = (1 - z)^(-beta) exp(x z / (1 - z))`.
///
/// This is the usual generalised Laguerre polynomial evaluated at `-x`.
pub fn laguerre_eval<T: Scalar>(n: usize, x: &T, beta: &T) -> Result<T> {
    if *beta <= T::zero() {
        return Err(Error::domain(format!("beta = {beta} must be positive")));
    }
    if *x < T::zero() {
        return Err(Error::domain(format!("Laguerre argument {x} is negative")));
    }
    Ok(laguerre_poly(n, x, beta))
}

/// [`laguerre_eval`] at an arbitrary argument.
pub fn laguerre_poly<T: Scalar>(n: usize, x: &T, beta: &T) -> T {
    let geo = PowerSeries::from_coeffs(vec![T::one(); n + 1], n);
    let shift = PowerSeries::linear(T::zero(), x.clone(), n).mul(&geo);
    let base = PowerSeries::linear(T::one(), -T::one(), n).pow(&(-beta.clone()));
    base.mul(&shift.exp()).coeff(n)
}
