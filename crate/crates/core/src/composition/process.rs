use crate::combinatorics::multinomial;
use crate::error::{Error, Result};
use crate::mvk::Composition;
use crate::scalar::Scalar;
use crate::spectral::{pi_weights, BirthDeathSpec, SpectralData};

/// `N` independent copies of a birth-death process, observed through the
/// occupancy vector `x` (`x_j` particles in state `j`, states from 0).
#[derive(Clone, Debug)]
pub struct CompositionProcess<T> {
    base: BirthDeathSpec<T>,
    particles: usize,
    categories: usize,
    data: Option<SpectralData<T>>,
}

impl<T: Scalar> CompositionProcess<T> {
    /// `categories` bounds the occupied states for infinite bases; finite
    /// bases always use their full state space. `levels` is the number of
    /// spectral atoms kept for infinite spectra.
    pub fn new(
        base: BirthDeathSpec<T>,
        particles: usize,
        categories: Option<usize>,
        levels: usize,
    ) -> Result<Self> {
        if particles == 0 {
            return Err(Error::domain("a composition process needs N >= 1 particles"));
        }
        let categories = match (base.max_state(), categories) {
            (Some(n), _) => n + 1,
            (None, Some(d)) if d >= 2 => d,
            (None, _) => {
                return Err(Error::domain(
                    "infinite bases need an occupancy bound of at least 2 states",
                ))
            }
        };
        let data = SpectralData::new(&base, levels).ok();
        Ok(Self {
            base,
            particles,
            categories,
            data,
        })
    }

    pub fn base(&self) -> &BirthDeathSpec<T> {
        &self.base
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn categories(&self) -> usize {
        self.categories
    }

    pub fn spectral_data(&self) -> Result<&SpectralData<T>> {
        self.data
            .as_ref()
            .ok_or_else(|| Error::Unsupported("the base process has no closed-form spectrum".into()))
    }

    /// Every occupancy vector over the `categories` states.
    pub fn states(&self) -> Vec<Composition> {
        Composition::all(self.particles, self.categories)
    }

    /// Pads `x` with empty states up to `categories` and checks `|x| = N`.
    pub fn normalize(&self, x: &Composition) -> Result<Composition> {
        if x.total() != self.particles {
            return Err(Error::Dimension(format!(
                "|x| = {} but the process has N = {} particles",
                x.total(),
                self.particles
            )));
        }
        let mut v = x.as_slice().to_vec();
        if v.len() > self.categories {
            if v[self.categories..].iter().any(|&k| k > 0) {
                return Err(Error::domain(format!(
                    "{x} occupies a state beyond the bound {}",
                    self.categories
                )));
            }
            v.truncate(self.categories);
        }
        v.resize(self.categories, 0);
        Ok(Composition::new(v))
    }

    /// `m~(x; pi) = C(N; x) prod pi_j^x_j`.
    pub fn reversible_weight(&self, x: &Composition) -> Result<T> {
        let mut w = multinomial::<T>(x.as_slice());
        for (j, &k) in x.as_slice().iter().enumerate() {
            if k > 0 {
                w = w * pi_weights(&self.base, j)?.powi(k as i32);
            }
        }
        Ok(w)
    }
}

/// Jumps out of `x`: one particle moves `j -> j+1` at rate `x_j lambda_j` or
/// `j -> j-1` at rate `x_j mu_j`. Zero rates are omitted; the target may be
/// one entry longer than `x`.
pub fn composition_rates<T: Scalar>(
    x: &Composition,
    base: &BirthDeathSpec<T>,
) -> Vec<(Composition, T)> {
    let xs = x.as_slice();
    let mut out = Vec::new();
    for (j, &k) in xs.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let kt = T::from_usize(k);
        let up = base.birth_rate(j);
        if !up.is_zero() {
            let mut y = xs.to_vec();
            if y.len() == j + 1 {
                y.push(0);
            }
            y[j] -= 1;
            y[j + 1] += 1;
            out.push((Composition::new(y), kt.clone() * up));
        }
        let down = base.death_rate(j);
        if j > 0 && !down.is_zero() {
            let mut y = xs.to_vec();
            y[j] -= 1;
            y[j - 1] += 1;
            out.push((Composition::new(y), kt * down));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn rates_from_all_in_zero() {
        let base = BirthDeathSpec::mm_infinity(rat(2, 1), rat(1, 1)).unwrap();
        let r = composition_rates(&Composition::new(vec![3]), &base);
        assert_eq!(r, vec![(Composition::new(vec![2, 1]), rat(6, 1))]);
    }

    #[test]
    fn ehrenfest_rates_and_detailed_balance() {
        let base = BirthDeathSpec::ehrenfest(2, rat(1, 3)).unwrap();
        let proc = CompositionProcess::new(base.clone(), 2, None, 0).unwrap();
        let x = Composition::new(vec![1, 1, 0]);
        let r = composition_rates(&x, &base);
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], (Composition::new(vec![0, 2, 0]), rat(2, 3)));
        assert_eq!(r[1], (Composition::new(vec![1, 0, 1]), rat(1, 3)));
        assert_eq!(r[2], (Composition::new(vec![2, 0, 0]), rat(2, 3)));
        let total: Rational = r.iter().map(|(_, v)| v.clone()).sum();
        assert_eq!(total, rat(5, 3));
        for s in proc.states() {
            for (t, rate) in composition_rates(&s, &base) {
                let back = composition_rates(&t, &base)
                    .into_iter()
                    .find(|(u, _)| *u == s)
                    .map(|(_, v)| v)
                    .unwrap();
                assert_eq!(
                    proc.reversible_weight(&s).unwrap() * rate,
                    proc.reversible_weight(&t).unwrap() * back
                );
            }
        }
    }

    #[test]
    fn normalize_pads_and_checks() {
        let base = BirthDeathSpec::mm_infinity(1.0, 1.0).unwrap();
        let proc = CompositionProcess::new(base, 2, Some(4), 20).unwrap();
        assert_eq!(
            proc.normalize(&Composition::new(vec![1, 1])).unwrap(),
            Composition::new(vec![1, 1, 0, 0])
        );
        assert!(proc.normalize(&Composition::new(vec![1])).is_err());
        assert!(proc.normalize(&Composition::new(vec![0, 0, 0, 0, 2])).is_err());
        let base = BirthDeathSpec::mm_infinity(1.0, 1.0).unwrap();
        assert!(CompositionProcess::new(base, 2, None, 20).is_err());
    }
}
