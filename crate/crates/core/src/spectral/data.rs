use statrs::function::gamma::ln_gamma;

use crate::combinatorics::{binomial, binomial_general, factorial, falling, rising};
use crate::error::{Error, Result};
use crate::polys::{
    charlier_poly, dual_hahn_poly, krawtchouk_poly, laguerre_poly, meixner_poly, recurrence_eval,
    KrawtchoukParams,
};
use crate::scalar::Scalar;

use super::process::{BirthDeathSpec, Family, LinearRegime};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    Discrete,
    Continuous,
}

/// Classical family whose members give the spectral polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyFamily {
    Charlier,
    Meixner,
    Laguerre,
    DualHahn,
    Krawtchouk,
}

/// How the spectral polynomials are obtained from a classical family:
/// `Q_n(zeta) = ratio^n c_n P_n(scale * zeta + shift)` where `c_n` is the
/// family's own normaliser making `Q_n(0) = 1` (`1/K_n(0)` for Krawtchouk,
/// `n!/(beta)_n` for Laguerre, 1 otherwise).
#[derive(Clone, Debug, PartialEq)]
pub struct Rescaling<T> {
    pub family: PolyFamily,
    pub scale: T,
    pub shift: T,
    pub ratio: T,
}

/// Spectral measure and polynomials of one of the named birth-death families.
#[derive(Clone, Debug)]
pub struct SpectralData<T> {
    spec: BirthDeathSpec<T>,
    kind: SpectrumKind,
    truncation: usize,
}

impl<T: Scalar> SpectralData<T> {
    /// `truncation` is the number of atoms used by [`SpectralData::atoms`]
    /// for infinite discrete spectra; finite spectra ignore it.
    pub fn new(spec: &BirthDeathSpec<T>, truncation: usize) -> Result<Self> {
        let kind = match spec.family() {
            Family::Custom { .. } => {
                return Err(Error::Unsupported(
                    "custom rate sequences have no closed-form spectrum".into(),
                ))
            }
            Family::Linear { .. } if spec.linear_regime() == Some(LinearRegime::Critical) => {
                SpectrumKind::Continuous
            }
            _ => SpectrumKind::Discrete,
        };
        Ok(Self {
            spec: spec.clone(),
            kind,
            truncation: truncation.max(1),
        })
    }

    pub fn spec(&self) -> &BirthDeathSpec<T> {
        &self.spec
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Number of atoms for finite spectra.
    pub fn support_size(&self) -> Option<usize> {
        self.spec.max_state().map(|n| n + 1)
    }

    /// True when `zeta_0 = 0`, which is exactly when a stationary law exists.
    pub fn stationary_exists(&self) -> bool {
        match self.spec.family() {
            Family::Linear { .. } => self.spec.linear_regime() == Some(LinearRegime::Subcritical),
            _ => true,
        }
    }

    pub fn rescaling(&self) -> Rescaling<T> {
        let one = T::one();
        let zero = T::zero();
        match self.spec.family() {
            Family::MmInfinity { mu, .. } => Rescaling {
                family: PolyFamily::Charlier,
                scale: one.clone() / mu.clone(),
                shift: zero,
                ratio: one,
            },
            Family::Linear { lambda, mu, beta } => match self.regime() {
                LinearRegime::Subcritical => Rescaling {
                    family: PolyFamily::Meixner,
                    scale: one.clone() / (mu.clone() - lambda.clone()),
                    shift: zero,
                    ratio: one,
                },
                LinearRegime::Supercritical => Rescaling {
                    family: PolyFamily::Meixner,
                    scale: one / (lambda.clone() - mu.clone()),
                    shift: -beta.clone(),
                    ratio: mu.clone() / lambda.clone(),
                },
                LinearRegime::Critical => Rescaling {
                    family: PolyFamily::Laguerre,
                    scale: -(one.clone() / lambda.clone()),
                    shift: zero,
                    ratio: one,
                },
            },
            Family::TwoUrn { .. } => Rescaling {
                family: PolyFamily::DualHahn,
                scale: one.clone(),
                shift: zero,
                ratio: one,
            },
            Family::Ehrenfest { .. } => Rescaling {
                family: PolyFamily::Krawtchouk,
                scale: one.clone(),
                shift: zero,
                ratio: one,
            },
            Family::Custom { .. } => unreachable!("rejected at construction"),
        }
    }

    fn regime(&self) -> LinearRegime {
        self.spec.linear_regime().expect("linear family")
    }

    fn check_atom(&self, l: usize) -> Result<()> {
        if self.kind == SpectrumKind::Continuous {
            return Err(Error::Unsupported("the spectrum is continuous (no atoms)".into()));
        }
        if let Some(size) = self.support_size() {
            if l >= size {
                return Err(Error::domain(format!("atom {l} outside the support 0..{size}")));
            }
        }
        Ok(())
    }

    /// Spectral point `zeta_l`.
    pub fn zeta(&self, l: usize) -> Result<T> {
        self.check_atom(l)?;
        let lt = T::from_usize(l);
        Ok(match self.spec.family() {
            Family::MmInfinity { mu, .. } => mu.clone() * lt,
            Family::Linear { lambda, mu, beta } => match self.regime() {
                LinearRegime::Subcritical => (mu.clone() - lambda.clone()) * lt,
                _ => (lt + beta.clone()) * (lambda.clone() - mu.clone()),
            },
            Family::TwoUrn { a, b, .. } => T::from_usize(l * (a + b + 1 - l)),
            Family::Ehrenfest { .. } => lt,
            Family::Custom { .. } => unreachable!(),
        })
    }

    /// Mass `psi({zeta_l})`.
    pub fn mass(&self, l: usize) -> Result<T> {
        self.check_atom(l)?;
        match self.spec.family() {
            Family::MmInfinity { lambda, mu } => {
                let nu = lambda.clone() / mu.clone();
                if T::EXACT {
                    let e = (-nu.clone()).exp().ok_or_else(|| {
                        Error::Unsupported("Poisson masses need exp (use the float backend)".into())
                    })?;
                    Ok(e * nu.powi(l as i32) / factorial::<T>(l))
                } else {
                    let nu = nu.to_f64();
                    let ln = -nu + l as f64 * nu.ln() - ln_gamma(l as f64 + 1.0);
                    float(ln.exp())
                }
            }
            Family::Linear { lambda, mu, beta } => {
                let r = match self.regime() {
                    LinearRegime::Subcritical => lambda.clone() / mu.clone(),
                    _ => mu.clone() / lambda.clone(),
                };
                negative_binomial_mass(beta, &r, l)
            }
            Family::TwoUrn { a, b, n } => Ok(two_urn_mass(*a, *b, *n, l)),
            Family::Ehrenfest { n, p } => {
                let q = T::one() - p.clone();
                Ok(binomial::<T>(*n, l) * p.powi(l as i32) * q.powi((n - l) as i32))
            }
            Family::Custom { .. } => unreachable!(),
        }
    }

    /// `(zeta_l, psi_l)`.
    pub fn atom(&self, l: usize) -> Result<(T, T)> {
        Ok((self.zeta(l)?, self.mass(l)?))
    }

    /// All atoms of a finite spectrum, or the first `truncation` of an infinite one.
    pub fn atoms(&self) -> Result<Vec<(T, T)>> {
        let count = self.support_size().unwrap_or(self.truncation);
        (0..count).map(|l| self.atom(l)).collect()
    }

    /// Gamma density of the continuous spectrum.
    pub fn density(&self, z: f64) -> Option<f64> {
        if self.kind != SpectrumKind::Continuous {
            return None;
        }
        let Family::Linear { lambda, beta, .. } = self.spec.family() else {
            return None;
        };
        if z <= 0.0 {
            return Some(0.0);
        }
        let (lambda, beta) = (lambda.to_f64(), beta.to_f64());
        let ln = (beta - 1.0) * z.ln() - z / lambda - beta * lambda.ln() - ln_gamma(beta);
        Some(ln.exp())
    }

    /// `Q_i(zeta)` from the closed-form family at an arbitrary point.
    pub fn poly_at(&self, i: usize, zeta: &T) -> Result<T> {
        if let Some(n) = self.spec.max_state() {
            if i > n {
                return Err(Error::domain(format!("degree {i} exceeds the last state {n}")));
            }
        }
        let r = self.rescaling();
        let arg = r.scale.clone() * zeta.clone() + r.shift.clone();
        let base = match self.spec.family() {
            Family::MmInfinity { lambda, mu } => charlier_poly(i, &arg, &(lambda.clone() / mu.clone())),
            Family::Linear { lambda, mu, beta } => match self.regime() {
                LinearRegime::Subcritical => {
                    meixner_poly(i, &arg, beta, &(lambda.clone() / mu.clone()))
                }
                LinearRegime::Supercritical => {
                    meixner_poly(i, &arg, beta, &(mu.clone() / lambda.clone()))
                }
                LinearRegime::Critical => {
                    factorial::<T>(i) / rising(beta, i) * laguerre_poly(i, &arg, beta)
                }
            },
            Family::TwoUrn { a, b, n } => dual_hahn_poly(i, &arg, *a, *b, *n),
            Family::Ehrenfest { n, p } => {
                let params = KrawtchoukParams::new(*n, p.clone())?;
                let at_zero = factorial::<T>(i) * binomial::<T>(*n, i) * (-p.clone()).powi(i as i32);
                krawtchouk_poly(i, &arg, &params) / at_zero
            }
            Family::Custom { .. } => unreachable!(),
        };
        Ok(r.ratio.powi(i as i32) * base)
    }

    /// `Q_i(zeta_l)`.
    pub fn poly(&self, i: usize, l: usize) -> Result<T> {
        self.poly_at(i, &self.zeta(l)?)
    }

    /// `Q_i(zeta)` from the three-term recurrence of the rates.
    pub fn poly_recurrence(&self, i: usize, zeta: &T) -> Result<T> {
        recurrence_eval(&self.spec, i, zeta)
    }

    pub fn to_f64(&self) -> SpectralData<f64> {
        SpectralData {
            spec: self.spec.to_f64(),
            kind: self.kind,
            truncation: self.truncation,
        }
    }
}

fn float<T: Scalar>(v: f64) -> Result<T> {
    T::from_f64(v).ok_or_else(|| Error::domain(format!("{v} is not finite")))
}

/// `(1-r)^beta (beta)_l / l! r^l`.
fn negative_binomial_mass<T: Scalar>(beta: &T, r: &T, l: usize) -> Result<T> {
    let one = T::one();
    if T::EXACT {
        let head = (one - r.clone()).powf(beta).ok_or_else(|| {
            Error::Unsupported(format!(
                "(1-r)^beta with beta = {beta} is irrational (use the float backend)"
            ))
        })?;
        Ok(head * rising(beta, l) / factorial::<T>(l) * r.powi(l as i32))
    } else {
        let (b, r) = (beta.to_f64(), r.to_f64());
        let lf = l as f64;
        let ln = b * (1.0 - r).ln() + ln_gamma(lf + b) - ln_gamma(b) - ln_gamma(lf + 1.0)
            + lf * r.ln();
        float(ln.exp())
    }
}

/// Orthogonality weight of the dual Hahn polynomials at `zeta_z = z(a+b+1-z)`:
/// `C(N-b-1, N) N! N_[z] a_[z] (2z-a-b-1) / (z! b_[z] (z-a-b-1)_(N+1))`.
fn two_urn_mass<T: Scalar>(a: usize, b: usize, n: usize, z: usize) -> T {
    let (at, bt, nt, zt) = (
        T::from_usize(a),
        T::from_usize(b),
        T::from_usize(n),
        T::from_usize(z),
    );
    let head = binomial_general(&(nt.clone() - bt.clone() - T::one()), n) * factorial::<T>(n);
    let num = head
        * falling(&nt, z)
        * falling(&at, z)
        * (zt.clone() + zt.clone() - at.clone() - bt.clone() - T::one());
    let den = factorial::<T>(z)
        * falling(&bt, z)
        * rising(&(zt - at - bt - T::one()), n + 1);
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn ehrenfest_support_and_masses() {
        let s = BirthDeathSpec::ehrenfest(2, rat(1, 2)).unwrap();
        let d = SpectralData::new(&s, 0).unwrap();
        let atoms = d.atoms().unwrap();
        assert_eq!(
            atoms,
            vec![(rat(0, 1), rat(1, 4)), (rat(1, 1), rat(1, 2)), (rat(2, 1), rat(1, 4))]
        );
        assert!(d.stationary_exists());
        assert!(d.zeta(3).is_err());
    }

    #[test]
    fn two_urn_masses_frozen() {
        // Exact values of the weight for a=4, b=5, N=3; they also equal 1/sum_j pi_j Q_j^2.
        let s = BirthDeathSpec::<Rational>::two_urn(4, 5, 3).unwrap();
        let d = SpectralData::new(&s, 0).unwrap();
        let m: Vec<Rational> = (0..4).map(|l| d.mass(l).unwrap()).collect();
        assert_eq!(m[0], rat(5, 42));
        assert_eq!(m[1], rat(8, 21));
        assert_eq!(m[2], rat(27, 70));
        assert_eq!(m.iter().cloned().sum::<Rational>(), rat(1, 1));
        assert_eq!(d.poly(3, 1).unwrap(), rat(-5, 4));
        assert_eq!(d.poly(3, 2).unwrap(), rat(5, 3));
    }

    #[test]
    fn negative_binomial_example() {
        let s = BirthDeathSpec::linear(rat(1, 1), rat(2, 1), rat(1, 1)).unwrap();
        let d = SpectralData::new(&s, 40).unwrap();
        for z in 0..6 {
            let (zeta, psi) = d.atom(z).unwrap();
            assert_eq!(zeta, rat(z as i64, 1));
            assert_eq!(psi, rat(1, 2) * rat(1, 2).powi(z as i32));
        }
        let f = d.to_f64();
        assert!((f.mass(3).unwrap() - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn poisson_masses_are_float_only() {
        let s = BirthDeathSpec::mm_infinity(rat(1, 1), rat(1, 1)).unwrap();
        assert!(matches!(SpectralData::new(&s, 10).unwrap().mass(0), Err(Error::Unsupported(_))));
        let f = SpectralData::new(&s.to_f64(), 10).unwrap();
        assert!((f.mass(2).unwrap() - (-1.0f64).exp() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_recurrence() {
        let specs = vec![
            BirthDeathSpec::mm_infinity(rat(3, 2), rat(1, 2)).unwrap(),
            BirthDeathSpec::linear(rat(1, 1), rat(3, 1), rat(2, 1)).unwrap(),
            BirthDeathSpec::linear(rat(3, 1), rat(1, 1), rat(3, 2)).unwrap(),
            BirthDeathSpec::linear(rat(2, 1), rat(2, 1), rat(5, 2)).unwrap(),
            BirthDeathSpec::two_urn(4, 5, 3).unwrap(),
            BirthDeathSpec::ehrenfest(4, rat(1, 3)).unwrap(),
        ];
        for s in specs {
            let d = SpectralData::new(&s, 10).unwrap();
            let max = s.max_state().unwrap_or(8).min(8);
            for zeta in [rat(0, 1), rat(1, 3), rat(7, 2), rat(11, 1)] {
                for i in 0..=max {
                    assert_eq!(
                        d.poly_at(i, &zeta).unwrap(),
                        d.poly_recurrence(i, &zeta).unwrap(),
                        "{} degree {i} at {zeta}",
                        s.name()
                    );
                }
            }
        }
    }

    #[test]
    fn continuous_case_has_density() {
        let s = BirthDeathSpec::linear(2.0, 2.0, 1.0).unwrap();
        let d = SpectralData::new(&s, 10).unwrap();
        assert_eq!(d.kind(), SpectrumKind::Continuous);
        assert!(!d.stationary_exists());
        assert!((d.density(1.0).unwrap() - (-0.5f64).exp() / 2.0).abs() < 1e-15);
        assert!(d.atom(0).is_err());
    }

    #[test]
    fn custom_is_unsupported() {
        let s = BirthDeathSpec::custom(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert!(matches!(SpectralData::new(&s, 5), Err(Error::Unsupported(_))));
    }
}
