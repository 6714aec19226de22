use std::collections::HashMap;
use std::hash::Hash;

use rayon::prelude::*;
use statrs::distribution::{Discrete, DiscreteCDF, Poisson};

use super::JumpProcess;
use crate::error::{Error, Result};
use crate::mvk::Composition;
use crate::scalar::Scalar;
use crate::spectral::BirthDeathSpec;

/// Poisson tail mass left out of the uniformization series.
pub const EXPM_TAIL: f64 = 1e-13;

pub const MAX_EXPM_STATES: usize = 10_000;

/// Transition matrix of a truncated chain. Jumps out of the truncation are
/// not reflected; their mass is lost and reported per row.
#[derive(Clone, Debug)]
pub struct ExpmMatrix<S> {
    states: Vec<S>,
    index: HashMap<S, usize>,
    p: Vec<Vec<f64>>,
    lost: Vec<f64>,
}

impl<S: Clone + Eq + Hash> ExpmMatrix<S> {
    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// `p_xy(t)`; zero when either state is outside the truncation.
    pub fn get(&self, x: &S, y: &S) -> f64 {
        match (self.index_of(x), self.index_of(y)) {
            (Some(i), Some(j)) => self.p[i][j],
            _ => 0.0,
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.p
    }

    /// `1 - sum_y p_xy(t)` for each row.
    pub fn lost_mass(&self) -> &[f64] {
        &self.lost
    }
}

/// `e^(tQ)` over the enumerated (lexicographic) state space of `proc`.
pub fn generator_expm<P: JumpProcess>(proc: &P, t: f64, max_states: usize) -> Result<ExpmMatrix<Composition>> {
    let states = proc.state_space();
    if states.len() > max_states.min(MAX_EXPM_STATES) {
        return Err(Error::ScaleExceeded(format!(
            "{} states exceed the bound {}",
            states.len(),
            max_states.min(MAX_EXPM_STATES)
        )));
    }
    let index: HashMap<Composition, usize> =
        states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut rows = Vec::with_capacity(states.len());
    let mut exit = Vec::with_capacity(states.len());
    for x in &states {
        let mut row = Vec::new();
        let mut out = 0.0;
        for (y, r) in proc.jumps(x) {
            out += r;
            if let Some(j) = proc.admit(&y).and_then(|y| index.get(&y).copied()) {
                row.push((j, r));
            }
        }
        rows.push(row);
        exit.push(out);
    }
    let (p, lost) = uniformize(&rows, &exit, t)?;
    Ok(ExpmMatrix {
        states,
        index,
        p,
        lost,
    })
}

/// `e^(tQ)` for a one-dimensional chain restricted to `0..=bound` (further
/// capped by a finite state space).
pub fn birth_death_expm<T: Scalar>(spec: &BirthDeathSpec<T>, t: f64, bound: usize) -> Result<ExpmMatrix<usize>> {
    let top = spec.max_state().map_or(bound, |m| m.min(bound));
    if top + 1 > MAX_EXPM_STATES {
        return Err(Error::ScaleExceeded(format!("{} states exceed {MAX_EXPM_STATES}", top + 1)));
    }
    let mut rows = Vec::with_capacity(top + 1);
    let mut exit = Vec::with_capacity(top + 1);
    for i in 0..=top {
        let up = spec.birth_rate(i).to_f64();
        let down = if i == 0 { 0.0 } else { spec.death_rate(i).to_f64() };
        let mut row = Vec::new();
        if up > 0.0 && i < top {
            row.push((i + 1, up));
        }
        if down > 0.0 {
            row.push((i - 1, down));
        }
        rows.push(row);
        exit.push(up + down);
    }
    let (p, lost) = uniformize(&rows, &exit, t)?;
    let states: Vec<usize> = (0..=top).collect();
    Ok(ExpmMatrix {
        index: states.iter().map(|&i| (i, i)).collect(),
        states,
        p,
        lost,
    })
}

/// Rows of `sum_k Pois(k; Lt) P^k` with `P = I + Q / L`, `L = max exit rate`.
fn uniformize(rows: &[Vec<(usize, f64)>], exit: &[f64], t: f64) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("time t = {t} must be finite and >= 0")));
    }
    let n = rows.len();
    let rate = exit.iter().copied().fold(0.0, f64::max);
    if t == 0.0 || rate == 0.0 {
        let p = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        return Ok((p, vec![0.0; n]));
    }
    let mean = rate * t;
    let pois = Poisson::new(mean).map_err(|e| Error::domain(e.to_string()))?;
    let mut kmax = mean.ceil() as u64;
    while pois.sf(kmax) > EXPM_TAIL {
        kmax += 1 + (mean.sqrt() as u64);
    }
    let weights: Vec<f64> = (0..=kmax).map(|k| pois.ln_pmf(k).exp()).collect();
    let p: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            let mut acc: Vec<f64> = v.iter().map(|x| x * weights[0]).collect();
            for w in &weights[1..] {
                let mut next: Vec<f64> = v.iter().zip(exit).map(|(x, e)| x * (1.0 - e / rate)).collect();
                for (a, row) in rows.iter().enumerate() {
                    if v[a] != 0.0 {
                        for &(b, r) in row {
                            next[b] += v[a] * r / rate;
                        }
                    }
                }
                v = next;
                for (s, x) in acc.iter_mut().zip(&v) {
                    *s += w * x;
                }
            }
            acc
        })
        .collect();
    let lost = p.iter().map(|r| 1.0 - r.iter().sum::<f64>()).collect();
    Ok((p, lost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::{CompositionProcess, UrnSpec};

    #[test]
    fn identity_at_zero() {
        let base = BirthDeathSpec::ehrenfest(2, 0.3).unwrap();
        let proc = CompositionProcess::new(base, 2, None, 0).unwrap();
        let m = generator_expm(&proc, 0.0, 100).unwrap();
        for (i, row) in m.rows().iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn rows_are_stochastic_for_finite_chains() {
        let urn = UrnSpec::two_colour(4, 0.65).unwrap();
        let m = generator_expm(&urn, 2.5, 100).unwrap();
        assert!(m.lost_mass().iter().all(|l| l.abs() < 1e-12));
        let m = birth_death_expm(&BirthDeathSpec::<f64>::two_urn(4, 5, 3).unwrap(), 0.7, 50).unwrap();
        assert_eq!(m.states().len(), 4);
        assert!(m.lost_mass().iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn mm_infinity_closed_form() {
        let spec = BirthDeathSpec::mm_infinity(1.0, 1.0).unwrap();
        let m = birth_death_expm(&spec, 1.0, 40).unwrap();
        let exact = (-(1.0 - (-1.0f64).exp())).exp();
        assert!((m.get(&0, &0) - exact).abs() < 1e-12);
        assert!(m.lost_mass()[0] < 1e-12 && m.lost_mass()[0] >= -1e-15);
    }

    #[test]
    fn single_ball_urn() {
        let urn = UrnSpec::two_colour(1, 0.5).unwrap();
        let t = 0.8;
        let m = generator_expm(&urn, t, 10).unwrap();
        let x = Composition::new(vec![1, 0]);
        let y = Composition::new(vec![0, 1]);
        assert!((m.get(&x, &y) - (1.0 - (-2.0 * t).exp()) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn too_many_states() {
        let urn = UrnSpec::two_colour(30, 0.5).unwrap();
        assert!(matches!(generator_expm(&urn, 1.0, 10), Err(Error::ScaleExceeded(_))));
    }
}
