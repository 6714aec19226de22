use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::PowerSeries;

/// Poisson-Charlier `C_n(z; nu)`: `sum_n C_n w^n / n! = e^w (1 - w/nu)^z`.
pub fn charlier_eval<T: Scalar>(n: usize, z: &T, nu: &T) -> Result<T> {
    if *nu <= T::zero() {
        return Err(Error::domain(format!("nu = {nu} must be positive")));
    }
    if *z < T::zero() {
        return Err(Error::domain(format!("Charlier argument {z} is negative")));
    }
    Ok(charlier_poly(n, z, nu))
}

/// [`charlier_eval`] at an arbitrary argument.
pub fn charlier_poly<T: Scalar>(n: usize, z: &T, nu: &T) -> T {
    let e = PowerSeries::linear(T::zero(), T::one(), n).exp();
    let f = PowerSeries::linear(T::one(), -(T::one() / nu.clone()), n).pow(z);
    e.mul(&f).coeff(n) * factorial::<T>(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn spec_examples() {
        assert_eq!(charlier_eval(0, &rat(3, 1), &rat(2, 1)).unwrap(), rat(1, 1));
        assert_eq!(charlier_eval(1, &rat(3, 1), &rat(3, 1)).unwrap(), rat(0, 1));
        for nu in [rat(1, 2), rat(1, 1), rat(7, 3)] {
            assert_eq!(charlier_eval(2, &rat(0, 1), &nu).unwrap(), rat(1, 1));
        }
        assert!(charlier_eval(1, &rat(1, 1), &rat(0, 1)).is_err());
    }

    #[test]
    fn second_degree() {
        // C_2(z; nu) = 1 - 2z/nu + z(z-1)/nu^2
        let nu = rat(3, 2);
        for z in 0..5 {
            let zz = rat(z, 1);
            let expect = rat(1, 1) - rat(2, 1) * zz.clone() / nu.clone()
                + zz.clone() * (zz - rat(1, 1)) / (nu.clone() * nu.clone());
            assert_eq!(charlier_eval(2, &rat(z, 1), &nu).unwrap(), expect);
        }
    }
}
