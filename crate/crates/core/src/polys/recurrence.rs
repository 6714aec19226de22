use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::BirthDeathSpec;

/// `Q_0(z), ..., Q_n(z)` from
/// `-z Q_k = -(lambda_k + mu_k) Q_k + lambda_k Q_{k+1} + mu_k Q_{k-1}`,
/// `Q_0 = 1`, `Q_{-1} = 0`.
pub fn recurrence_values<T: Scalar>(spec: &BirthDeathSpec<T>, n: usize, z: &T) -> Result<Vec<T>> {
    let mut q = Vec::with_capacity(n + 1);
    q.push(T::one());
    for k in 0..n {
        let lam = spec.birth_rate(k);
        if lam.is_zero() {
            return Err(Error::VanishingBirthRate { state: k });
        }
        let mu = spec.death_rate(k);
        let prev = if k == 0 { T::zero() } else { q[k - 1].clone() };
        let next = ((lam.clone() + mu.clone() - z.clone()) * q[k].clone() - mu * prev) / lam;
        q.push(next);
    }
    Ok(q)
}

/// Values of [`recurrence_values`] with running forward-error bounds,
/// propagating local rounding through the absolute recurrence.
pub fn recurrence_values_bounded<T: Scalar>(spec: &BirthDeathSpec<T>, n: usize, z: &T) -> Result<(Vec<T>, Vec<f64>)> {
    let q = recurrence_values(spec, n, z)?;
    let zf = z.to_f64().abs();
    let mut err = Vec::with_capacity(n + 1);
    err.push(0.0);
    for k in 0..n {
        let lam = spec.birth_rate(k).to_f64();
        let mu = spec.death_rate(k).to_f64();
        let (qk, prev) = (q[k].to_f64().abs(), if k == 0 { 0.0 } else { q[k - 1].to_f64().abs() });
        let e_prev = if k == 0 { 0.0 } else { err[k - 1] };
        let local = 2.0 * f64::EPSILON * ((lam + mu + zf) * qk + mu * prev);
        let carried = (lam + mu - z.to_f64()).abs() * err[k] + mu * e_prev;
        err.push((carried + local) / lam + f64::EPSILON * q[k + 1].to_f64().abs());
    }
    Ok((q, err))
}

pub fn recurrence_eval<T: Scalar>(spec: &BirthDeathSpec<T>, n: usize, z: &T) -> Result<T> {
    Ok(recurrence_values(spec, n, z)?.pop().expect("non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polys::{krawtchouk_eval, KrawtchoukParams};
    use crate::scalar::{rat, Rational};

    #[test]
    fn ehrenfest_matches_scaled_krawtchouk() {
        let p = rat(1, 3);
        let spec = BirthDeathSpec::ehrenfest(4, p.clone()).unwrap();
        let kp = KrawtchoukParams::new(4, p).unwrap();
        for z in 0..=4usize {
            let q = recurrence_values(&spec, 4, &rat(z as i64, 1)).unwrap();
            for (n, v) in q.iter().enumerate() {
                let k = krawtchouk_eval(n, z, &kp).unwrap() / krawtchouk_eval(n, 0, &kp).unwrap();
                assert_eq!(*v, k);
            }
        }
    }

    #[test]
    fn spec_examples() {
        let spec = BirthDeathSpec::ehrenfest(2, rat(1, 2)).unwrap();
        assert_eq!(recurrence_eval(&spec, 0, &rat(5, 1)).unwrap(), rat(1, 1));
        assert_eq!(recurrence_eval(&spec, 1, &rat(1, 1)).unwrap(), rat(0, 1));
        let mm = BirthDeathSpec::mm_infinity(rat(1, 1), rat(1, 1)).unwrap();
        assert_eq!(recurrence_eval(&mm, 1, &rat(1, 1)).unwrap(), rat(0, 1));
    }

    #[test]
    fn vanishing_birth_rate_is_reported() {
        let spec = BirthDeathSpec::<Rational>::ehrenfest(2, rat(1, 2)).unwrap();
        assert_eq!(
            recurrence_eval(&spec, 4, &rat(0, 1)),
            Err(Error::VanishingBirthRate { state: 2 })
        );
    }
}
