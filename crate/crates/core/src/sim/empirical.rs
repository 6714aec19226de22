use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::SimConfig;
use crate::error::{Error, Result};
use crate::mvk::Composition;

/// Terminal-state counts of a batch of replicates.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    counts: BTreeMap<Composition, u64>,
    overflow: u64,
    replicates: u64,
}

/// Pearson test of observed counts against predicted probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Expected counts below this are pooled into one bin.
const MIN_EXPECTED: f64 = 5.0;

pub fn empirical_transition(paths: &[Option<Composition>]) -> Result<EmpiricalDistribution> {
    if paths.is_empty() {
        return Err(Error::domain("at least one replicate is required"));
    }
    let mut counts = BTreeMap::new();
    let mut overflow = 0;
    for p in paths {
        match p {
            Some(x) => *counts.entry(x.clone()).or_insert(0) += 1,
            None => overflow += 1,
        }
    }
    Ok(EmpiricalDistribution {
        counts,
        overflow,
        replicates: paths.len() as u64,
    })
}

impl EmpiricalDistribution {
    pub fn replicates(&self) -> u64 {
        self.replicates
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn count(&self, x: &Composition) -> u64 {
        self.counts.get(x).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<Composition, u64> {
        &self.counts
    }

    pub fn frequency(&self, x: &Composition) -> f64 {
        self.count(x) as f64 / self.replicates as f64
    }

    /// `sqrt(f (1 - f) / R)`.
    pub fn standard_error(&self, x: &Composition) -> f64 {
        let f = self.frequency(x);
        (f * (1.0 - f) / self.replicates as f64).sqrt()
    }

    /// Largest `|f - p| / sqrt(p (1 - p) / R)` over the predicted states.
    /// The standard error uses the prediction so that unobserved states are
    /// scored too; a state observed with `p = 0` scores infinity.
    pub fn max_z_score(&self, expected: &[(Composition, f64)]) -> f64 {
        let r = self.replicates as f64;
        expected
            .iter()
            .map(|(x, p)| {
                let f = self.frequency(x);
                let se = (p * (1.0 - p) / r).sqrt();
                if se > 0.0 {
                    (f - p).abs() / se
                } else if (f - p).abs() > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }

    /// Pearson chi-square against `expected`. Mass not covered by the listed
    /// states (and overflowed paths) forms a remainder cell; cells with
    /// expected count below 5 are pooled.
    pub fn chi_square(&self, expected: &[(Composition, f64)]) -> ChiSquareTest {
        let r = self.replicates as f64;
        let mut cells: Vec<(f64, f64)> = Vec::new();
        let (mut pooled_o, mut pooled_e) = (0.0, 0.0);
        let (mut seen_o, mut seen_p) = (0.0, 0.0);
        for (x, p) in expected {
            let o = self.count(x) as f64;
            let e = p * r;
            seen_o += o;
            seen_p += p;
            if e < MIN_EXPECTED {
                pooled_o += o;
                pooled_e += e;
            } else {
                cells.push((o, e));
            }
        }
        pooled_o += r - seen_o;
        pooled_e += (1.0 - seen_p).max(0.0) * r;
        if pooled_e > 0.0 || pooled_o > 0.0 {
            cells.push((pooled_o, pooled_e));
        }
        let statistic: f64 = cells
            .iter()
            .map(|&(o, e)| {
                if e > 0.0 {
                    (o - e) * (o - e) / e
                } else if o > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .sum();
        let dof = cells.len().saturating_sub(1);
        let p_value = if !statistic.is_finite() {
            0.0
        } else if dof == 0 {
            1.0
        } else {
            ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN)
        };
        ChiSquareTest {
            statistic,
            dof,
            p_value,
        }
    }

    pub fn report(&self, config: &SimConfig, expected: Option<&[(Composition, f64)]>) -> SimReport {
        let frequencies = self
            .counts
            .keys()
            .map(|x| {
                (
                    x.to_string(),
                    (self.count(x), self.frequency(x), self.standard_error(x)),
                )
            })
            .collect();
        let test = expected.map(|e| self.chi_square(e));
        SimReport {
            config: config.clone(),
            frequencies,
            overflow: self.overflow,
            chi_square: test.as_ref().map(|t| t.statistic),
            p_value: test.map(|t| t.p_value),
        }
    }
}

/// Serialised simulation result. `frequencies` maps `"(x0,x1,...)"` to
/// `[count, frequency, standard error]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimReport {
    pub config: SimConfig,
    pub frequencies: BTreeMap<String, (u64, f64, f64)>,
    pub overflow: u64,
    pub chi_square: Option<f64>,
    pub p_value: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[usize]) -> Composition {
        Composition::new(v.to_vec())
    }

    #[test]
    fn point_mass_and_overflow() {
        let e = empirical_transition(&[Some(c(&[1, 0]))]).unwrap();
        assert_eq!(e.frequency(&c(&[1, 0])), 1.0);
        assert_eq!(e.standard_error(&c(&[1, 0])), 0.0);
        let e = empirical_transition(&[Some(c(&[1, 0])), None, Some(c(&[0, 1])), None]).unwrap();
        let total: f64 = e.counts().keys().map(|x| e.frequency(x)).sum();
        assert_eq!(total, 0.5);
        assert_eq!(e.overflow(), 2);
        assert!(empirical_transition(&[]).is_err());
    }

    #[test]
    fn chi_square_pools_small_cells() {
        let mut paths = vec![Some(c(&[1, 0])); 600];
        paths.extend(vec![Some(c(&[0, 1])); 398]);
        paths.extend(vec![Some(c(&[2, 0])); 2]);
        let e = empirical_transition(&paths).unwrap();
        let expected = vec![(c(&[1, 0]), 0.6), (c(&[0, 1]), 0.398), (c(&[2, 0]), 0.002)];
        let t = e.chi_square(&expected);
        assert_eq!(t.dof, 2);
        assert!(t.statistic.abs() < 1e-9);
        assert!((t.p_value - 1.0).abs() < 1e-9);
        let wrong = vec![(c(&[1, 0]), 0.5), (c(&[0, 1]), 0.5)];
        assert!(e.chi_square(&wrong).p_value < 1e-6);
        assert!(e.max_z_score(&wrong) > 4.0);
    }

    #[test]
    fn report_round_trips() {
        let e = empirical_transition(&[Some(c(&[1, 0])), Some(c(&[0, 1]))]).unwrap();
        let cfg = SimConfig::new(3, 2, 1.0, c(&[1, 0])).unwrap();
        let r = e.report(&cfg, Some(&[(c(&[1, 0]), 0.5), (c(&[0, 1]), 0.5)]));
        let s = serde_json::to_string(&r).unwrap();
        let back: SimReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.frequencies["(1,0)"].0, 1);
    }
}
