use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sign of `lambda - mu` for the linear birth-death process with immigration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearRegime {
    /// `lambda < mu`: discrete spectrum starting at 0, negative binomial stationary law.
    Subcritical,
    /// `lambda > mu`: discrete spectrum starting at `beta (lambda - mu)`, no stationary law.
    Supercritical,
    /// `lambda = mu`: continuous gamma spectrum.
    Critical,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family<T> {
    /// `lambda_n = lambda`, `mu_n = n mu`.
    MmInfinity { lambda: T, mu: T },
    /// `lambda_n = (n + beta) lambda`, `mu_n = n mu`.
    Linear { lambda: T, mu: T, beta: T },
    /// `lambda_n = (N-n)(a-n)`, `mu_n = n (b - N + n)` on `0..=N`.
    TwoUrn { a: usize, b: usize, n: usize },
    /// `lambda_n = (N-n) p`, `mu_n = n q` on `0..=N`.
    Ehrenfest { n: usize, p: T },
    /// Explicit rates on a finite state space `0..birth.len()`.
    Custom { birth: Vec<T>, death: Vec<T> },
}

/// A birth-death process on the non-negative integers with `mu_0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BirthDeathSpec<T> {
    family: Family<T>,
}

impl<T: Scalar> BirthDeathSpec<T> {
    pub fn mm_infinity(lambda: T, mu: T) -> Result<Self> {
        positive(&lambda, "lambda")?;
        positive(&mu, "mu")?;
        Ok(Self {
            family: Family::MmInfinity { lambda, mu },
        })
    }

    pub fn linear(lambda: T, mu: T, beta: T) -> Result<Self> {
        positive(&lambda, "lambda")?;
        positive(&mu, "mu")?;
        positive(&beta, "beta")?;
        Ok(Self {
            family: Family::Linear { lambda, mu, beta },
        })
    }

    pub fn two_urn(a: usize, b: usize, n: usize) -> Result<Self> {
        if n == 0 || a < n || b < n {
            return Err(Error::domain(format!(
                "two-urn model needs N >= 1 and a, b >= N (a={a}, b={b}, N={n})"
            )));
        }
        Ok(Self {
            family: Family::TwoUrn { a, b, n },
        })
    }

    pub fn ehrenfest(n: usize, p: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("Ehrenfest urn needs N >= 1"));
        }
        if p <= T::zero() || p >= T::one() {
            return Err(Error::domain(format!("p = {p} must lie in (0, 1)")));
        }
        Ok(Self {
            family: Family::Ehrenfest { n, p },
        })
    }

    /// Finite chain with explicit rates. Requires `mu_0 = 0`, positive
    /// births below the last state, a zero birth rate at the last state
    /// and positive deaths above state 0.
    pub fn custom(birth: Vec<T>, death: Vec<T>) -> Result<Self> {
        if birth.is_empty() || birth.len() != death.len() {
            return Err(Error::Dimension(
                "birth and death rate vectors must be non-empty and of equal length".into(),
            ));
        }
        if !death[0].is_zero() {
            return Err(Error::domain("mu_0 must be 0 (absorbing processes are not supported)"));
        }
        let last = birth.len() - 1;
        if !birth[last].is_zero() {
            return Err(Error::domain("the last state must have zero birth rate"));
        }
        if birth.iter().chain(death.iter()).any(|r| *r < T::zero()) {
            return Err(Error::domain("rates must be non-negative"));
        }
        Ok(Self {
            family: Family::Custom { birth, death },
        })
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::MmInfinity { .. } => "mm-infinity",
            Family::Linear { .. } => "linear",
            Family::TwoUrn { .. } => "two-urn",
            Family::Ehrenfest { .. } => "ehrenfest",
            Family::Custom { .. } => "custom",
        }
    }

    pub fn birth_rate(&self, n: usize) -> T {
        match &self.family {
            Family::MmInfinity { lambda, .. } => lambda.clone(),
            Family::Linear { lambda, beta, .. } => {
                (T::from_usize(n) + beta.clone()) * lambda.clone()
            }
            Family::TwoUrn { a, n: big_n, .. } => {
                if n >= *big_n {
                    T::zero()
                } else {
                    T::from_usize((big_n - n) * (a - n))
                }
            }
            Family::Ehrenfest { n: big_n, p } => {
                if n >= *big_n {
                    T::zero()
                } else {
                    T::from_usize(big_n - n) * p.clone()
                }
            }
            Family::Custom { birth, .. } => birth.get(n).cloned().unwrap_or_else(T::zero),
        }
    }

    pub fn death_rate(&self, n: usize) -> T {
        match &self.family {
            Family::MmInfinity { mu, .. } | Family::Linear { mu, .. } => {
                T::from_usize(n) * mu.clone()
            }
            Family::TwoUrn { b, n: big_n, .. } => {
                if n > *big_n {
                    T::zero()
                } else {
                    T::from_usize(n * (b + n - big_n))
                }
            }
            Family::Ehrenfest { n: big_n, p } => {
                if n > *big_n {
                    T::zero()
                } else {
                    T::from_usize(n) * (T::one() - p.clone())
                }
            }
            Family::Custom { death, .. } => death.get(n).cloned().unwrap_or_else(T::zero),
        }
    }

    /// Largest reachable state, `None` for the infinite families.
    pub fn max_state(&self) -> Option<usize> {
        match &self.family {
            Family::MmInfinity { .. } | Family::Linear { .. } => None,
            Family::TwoUrn { n, .. } | Family::Ehrenfest { n, .. } => Some(*n),
            Family::Custom { birth, .. } => Some(birth.len() - 1),
        }
    }

    pub fn linear_regime(&self) -> Option<LinearRegime> {
        match &self.family {
            Family::Linear { lambda, mu, .. } => Some(if lambda < mu {
                LinearRegime::Subcritical
            } else if lambda > mu {
                LinearRegime::Supercritical
            } else {
                LinearRegime::Critical
            }),
            _ => None,
        }
    }

    /// Converts parameters to the float backend.
    pub fn to_f64(&self) -> BirthDeathSpec<f64> {
        let family = match &self.family {
            Family::MmInfinity { lambda, mu } => Family::MmInfinity {
                lambda: lambda.to_f64(),
                mu: mu.to_f64(),
            },
            Family::Linear { lambda, mu, beta } => Family::Linear {
                lambda: lambda.to_f64(),
                mu: mu.to_f64(),
                beta: beta.to_f64(),
            },
            Family::TwoUrn { a, b, n } => Family::TwoUrn {
                a: *a,
                b: *b,
                n: *n,
            },
            Family::Ehrenfest { n, p } => Family::Ehrenfest {
                n: *n,
                p: p.to_f64(),
            },
            Family::Custom { birth, death } => Family::Custom {
                birth: birth.iter().map(Scalar::to_f64).collect(),
                death: death.iter().map(Scalar::to_f64).collect(),
            },
        };
        BirthDeathSpec { family }
    }
}

fn positive<T: Scalar>(v: &T, name: &str) -> Result<()> {
    if *v > T::zero() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {v} must be positive")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn ehrenfest_rates() {
        let s = BirthDeathSpec::ehrenfest(3, rat(1, 3)).unwrap();
        assert_eq!(s.birth_rate(0), rat(1, 1));
        assert_eq!(s.death_rate(3), rat(2, 1));
        assert_eq!(s.birth_rate(3), rat(0, 1));
        assert_eq!(s.death_rate(0), rat(0, 1));
    }

    #[test]
    fn two_urn_rates_vanish_at_boundaries() {
        let s = BirthDeathSpec::<Rational>::two_urn(4, 5, 3).unwrap();
        assert_eq!(s.birth_rate(0), rat(12, 1));
        assert_eq!(s.birth_rate(3), rat(0, 1));
        assert_eq!(s.death_rate(0), rat(0, 1));
        assert_eq!(s.death_rate(3), rat(15, 1));
        assert!(BirthDeathSpec::<Rational>::two_urn(2, 5, 3).is_err());
    }

    #[test]
    fn custom_rejects_absorption() {
        let r = BirthDeathSpec::custom(vec![1.0, 0.0], vec![0.5, 1.0]);
        assert!(r.is_err());
        let ok = BirthDeathSpec::custom(vec![1.0, 0.0], vec![0.0, 1.0]);
        assert!(ok.is_ok());
    }

    #[test]
    fn linear_regimes() {
        let s = BirthDeathSpec::linear(1.0, 2.0, 1.0).unwrap();
        assert_eq!(s.linear_regime(), Some(LinearRegime::Subcritical));
        let s = BirthDeathSpec::linear(2.0, 2.0, 1.0).unwrap();
        assert_eq!(s.linear_regime(), Some(LinearRegime::Critical));
    }
}
