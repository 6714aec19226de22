use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::JumpProcess;
use crate::error::{Error, Result};
use crate::mvk::Composition;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub replicates: usize,
    pub t: f64,
    pub initial: Vec<usize>,
}

impl SimConfig {
    pub fn new(seed: u64, replicates: usize, t: f64, initial: Composition) -> Result<Self> {
        let c = Self {
            seed,
            replicates,
            t,
            initial: initial.into_vec(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::domain("at least one replicate is required"));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::domain(format!("horizon t = {} must be finite and >= 0", self.t)));
        }
        Ok(())
    }

    pub fn initial(&self) -> Composition {
        Composition::new(self.initial.clone())
    }

    /// Generator for replicate `r`: stream `r` of the seeded ChaCha8.
    pub fn rng(&self, replicate: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replicate as u64);
        rng
    }
}

/// Terminal state of each replicate at time `t`; `None` marks a path that
/// left the truncated state space.
pub fn simulate_path<P: JumpProcess>(proc: &P, config: &SimConfig) -> Result<Vec<Option<Composition>>> {
    config.validate()?;
    let start = proc.admit(&config.initial()).ok_or_else(|| {
        Error::Dimension(format!("initial state {} is outside the state space", config.initial()))
    })?;
    Ok((0..config.replicates)
        .into_par_iter()
        .map(|r| run(proc, start.clone(), config.t, &mut config.rng(r)))
        .collect())
}

fn run<P: JumpProcess>(proc: &P, mut x: Composition, horizon: f64, rng: &mut ChaCha8Rng) -> Option<Composition> {
    let mut time = 0.0;
    loop {
        let jumps = proc.jumps(&x);
        let total: f64 = jumps.iter().map(|(_, r)| r).sum();
        if total <= 0.0 {
            return Some(x);
        }
        let u: f64 = rng.random();
        time += -(1.0 - u).ln() / total;
        if time > horizon {
            return Some(x);
        }
        let mut pick = rng.random::<f64>() * total;
        let mut target = &jumps[jumps.len() - 1].0;
        for (y, r) in &jumps {
            if pick < *r {
                target = y;
                break;
            }
            pick -= r;
        }
        x = proc.admit(target)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::CompositionProcess;
    use crate::spectral::BirthDeathSpec;

    #[test]
    fn zero_horizon_and_absorbing_states() {
        let base = BirthDeathSpec::ehrenfest(2, 0.5).unwrap();
        let proc = CompositionProcess::new(base, 2, None, 0).unwrap();
        let x = Composition::new(vec![1, 0, 1]);
        let cfg = SimConfig::new(7, 50, 0.0, x.clone()).unwrap();
        assert!(simulate_path(&proc, &cfg).unwrap().iter().all(|y| y.as_ref() == Some(&x)));

        let base = BirthDeathSpec::custom(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        let proc = CompositionProcess::new(base, 3, None, 0).unwrap();
        let x = Composition::new(vec![2, 1]);
        let cfg = SimConfig::new(7, 20, 5.0, x.clone()).unwrap();
        assert!(simulate_path(&proc, &cfg).unwrap().iter().all(|y| y.as_ref() == Some(&x)));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let base = BirthDeathSpec::mm_infinity(1.0, 1.0).unwrap();
        let proc = CompositionProcess::new(base, 3, Some(5), 0).unwrap();
        let cfg = SimConfig::new(42, 2000, 1.5, Composition::new(vec![3])).unwrap();
        let a = simulate_path(&proc, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate_path(&proc, &cfg).unwrap());
        assert_eq!(a, b);
        let c = simulate_path(&proc, &SimConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn overflow_is_reported() {
        let base = BirthDeathSpec::mm_infinity(5.0, 1.0).unwrap();
        let proc = CompositionProcess::new(base, 2, Some(2), 0).unwrap();
        let cfg = SimConfig::new(1, 200, 3.0, Composition::new(vec![2])).unwrap();
        let out = simulate_path(&proc, &cfg).unwrap();
        assert!(out.iter().any(|y| y.is_none()));
    }

    #[test]
    fn rejects_bad_config() {
        assert!(SimConfig::new(0, 0, 1.0, Composition::new(vec![1])).is_err());
        assert!(SimConfig::new(0, 1, -1.0, Composition::new(vec![1])).is_err());
        assert!(SimConfig::new(0, 1, f64::NAN, Composition::new(vec![1])).is_err());
    }
}
