use crate::combinatorics::{factorial, rising};
use crate::error::{Error, Result};
use crate::polys::recurrence_values_bounded;
use crate::scalar::Scalar;

use super::data::{SpectralData, SpectrumKind};
use super::process::{BirthDeathSpec, Family, LinearRegime};
use super::quadrature::GaussLaguerre;

/// `pi_j = (lambda_0 ... lambda_{j-1}) / (mu_1 ... mu_j)`.
pub fn pi_weights<T: Scalar>(spec: &BirthDeathSpec<T>, j: usize) -> Result<T> {
    if let Some(n) = spec.max_state() {
        if j > n {
            return Err(Error::domain(format!("state {j} exceeds the last state {n}")));
        }
    }
    let mut pi = T::one();
    for k in 1..=j {
        let mu = spec.death_rate(k);
        if mu.is_zero() {
            return Err(Error::VanishingDeathRate { state: k });
        }
        pi = pi * spec.birth_rate(k - 1) / mu;
    }
    Ok(pi)
}

/// Stationary probabilities `p_0, ..., p_m` with `m = min(max_state, last
/// state)`, or `None` when `sum pi_k` diverges.
pub fn stationary_distribution<T: Scalar>(
    spec: &BirthDeathSpec<T>,
    max_state: usize,
) -> Result<Option<Vec<T>>> {
    if let Some(n) = spec.max_state() {
        let pis = (0..=n).map(|j| pi_weights(spec, j)).collect::<Result<Vec<T>>>()?;
        let total = pis.iter().cloned().fold(T::zero(), |a, b| a + b);
        return Ok(Some(
            pis.into_iter()
                .take(max_state + 1)
                .map(|p| p / total.clone())
                .collect(),
        ));
    }
    match spec.family() {
        Family::MmInfinity { .. } => {
            let data = SpectralData::new(spec, max_state + 1)?;
            // Poisson(lambda/mu): the spectral masses coincide with the stationary law.
            (0..=max_state).map(|l| data.mass(l)).collect::<Result<Vec<_>>>().map(Some)
        }
        Family::Linear { lambda, mu, beta } => match spec.linear_regime() {
            Some(LinearRegime::Subcritical) => {
                let r = lambda.clone() / mu.clone();
                let head = (T::one() - r.clone()).powf(beta).ok_or_else(|| {
                    Error::Unsupported(format!(
                        "(1-lambda/mu)^beta with beta = {beta} needs the float backend"
                    ))
                })?;
                Ok(Some(
                    (0..=max_state)
                        .map(|i| {
                            head.clone() * rising(beta, i) / factorial::<T>(i) * r.powi(i as i32)
                        })
                        .collect(),
                ))
            }
            _ => Ok(None),
        },
        _ => unreachable!("infinite families are M/M/inf and linear"),
    }
}

/// Truncation and quadrature settings for [`km_transition`].
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationControl {
    /// Target bound on the neglected tail plus float rounding; results
    /// whose estimate exceeds it are flagged.
    pub tol: f64,
    /// Hard cap on the number of atoms summed.
    pub max_terms: usize,
    /// Block length of the geometric-decay test.
    pub block: usize,
    /// Gauss-Laguerre node count for the continuous spectrum.
    pub quadrature_nodes: usize,
}

impl Default for TruncationControl {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_terms: 5000,
            block: 10,
            quadrature_nodes: 64,
        }
    }
}

/// Transition probability with its truncation diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition<T> {
    pub p: T,
    pub truncation_error_estimate: f64,
    /// Set when the tail estimate exceeds `tol` or decay was not observed.
    pub flagged: bool,
    /// Atoms summed (or quadrature nodes used).
    pub terms: usize,
}

/// `p_ij(t) = pi_j int e^(-zt) Q_i(z) Q_j(z) psi(dz)`.
pub fn km_transition<T: Scalar>(
    data: &SpectralData<T>,
    i: usize,
    j: usize,
    t: &T,
    control: &TruncationControl,
) -> Result<Transition<T>> {
    if *t < T::zero() {
        return Err(Error::domain(format!("time t = {t} must be non-negative")));
    }
    let pi_j = pi_weights(data.spec(), j)?;
    if let Some(n) = data.spec().max_state() {
        if i > n {
            return Err(Error::domain(format!("state {i} exceeds the last state {n}")));
        }
    }
    match data.kind() {
        SpectrumKind::Continuous => continuous(data, i, j, t, &pi_j, control),
        SpectrumKind::Discrete => {
            // Float terms carry a bound on the error of the two polynomial
            // values, evaluated by the recurrence.
            let term = |l: usize| -> Result<(T, f64)> {
                let (zeta, psi) = data.atom(l)?;
                let weight = decay(&zeta, t)? * psi;
                if T::EXACT {
                    return Ok((weight * data.poly_at(i, &zeta)? * data.poly_at(j, &zeta)?, 0.0));
                }
                let (q, e) = recurrence_values_bounded(data.spec(), i.max(j), &zeta)?;
                let (qi, qj) = (q[i].to_f64().abs(), q[j].to_f64().abs());
                let err = weight.to_f64().abs() * (qi * e[j] + qj * e[i] + e[i] * e[j]);
                Ok((weight * q[i].clone() * q[j].clone(), err))
            };
            if let Some(size) = data.support_size() {
                let mut p = T::zero();
                let (mut abs, mut err) = (0.0, 0.0);
                for l in 0..size {
                    let (v, e) = term(l)?;
                    abs += v.to_f64().abs();
                    err += e;
                    p = p + v;
                }
                let estimate = (roundoff::<T>(abs) + err) * pi_j.to_f64().abs();
                return Ok(Transition {
                    p: pi_j * p,
                    truncation_error_estimate: estimate,
                    flagged: estimate > control.tol,
                    terms: size,
                });
            }
            infinite_sum(term, &pi_j, control)
        }
    }
}

fn decay<T: Scalar>(zeta: &T, t: &T) -> Result<T> {
    if t.is_zero() {
        return Ok(T::one());
    }
    (-(zeta.clone() * t.clone()))
        .exp()
        .ok_or_else(|| Error::Unsupported("e^(-zeta t) needs the float backend".into()))
}

/// Rounding bound `eps * sum |terms|` of a float sum; zero when exact.
fn roundoff<T: Scalar>(abs_sum: f64) -> f64 {
    if T::EXACT {
        0.0
    } else {
        f64::EPSILON * abs_sum
    }
}

fn infinite_sum<T: Scalar>(
    term: impl Fn(usize) -> Result<(T, f64)>,
    pi_j: &T,
    control: &TruncationControl,
) -> Result<Transition<T>> {
    let block = control.block.max(1);
    let scale = pi_j.to_f64().abs();
    let mut total = T::zero();
    let mut blocks: Vec<f64> = Vec::new();
    let mut err = 0.0;
    let mut next = 0;
    let done = |total: T, estimate: f64, flagged: bool, terms: usize, blocks: &[f64], err: f64| {
        let r = roundoff::<T>(blocks.iter().sum()) + err * scale;
        Transition {
            p: pi_j.clone() * total,
            truncation_error_estimate: estimate + r,
            flagged: flagged || r > control.tol,
            terms,
        }
    };
    loop {
        let mut abs = 0.0;
        for l in next..next + block {
            let (v, e) = term(l)?;
            abs += v.to_f64().abs();
            err += e;
            total = total + v;
        }
        next += block;
        blocks.push(abs * scale);
        if blocks.len() >= 4 {
            let k = blocks.len();
            let (b1, b2, b3) = (blocks[k - 3], blocks[k - 2], blocks[k - 1]);
            if b3 == 0.0 {
                return Ok(done(total, 0.0, false, next, &blocks, err));
            }
            if b3 < b2 && b2 < b1 {
                let r = (b3 / b2).max(b2 / b1);
                let estimate = b3 * r / (1.0 - r);
                if estimate <= control.tol {
                    return Ok(done(total, estimate, false, next, &blocks, err));
                }
            }
        }
        if next >= control.max_terms {
            let k = blocks.len();
            let estimate = if k >= 2 && blocks[k - 1] < blocks[k - 2] {
                let r = blocks[k - 1] / blocks[k - 2];
                blocks[k - 1] * r / (1.0 - r)
            } else {
                f64::INFINITY
            };
            return Ok(done(total, estimate, true, next, &blocks, err));
        }
    }
}

/// Gamma spectrum: with `z = s y`, `s = lambda / (1 + lambda t)`, the
/// integral becomes `(1 + lambda t)^(-beta) E[Q_i(s Y) Q_j(s Y)]` for
/// `Y ~ Gamma(beta, 1)`, which a Gauss rule integrates exactly up to rounding.
fn continuous<T: Scalar>(
    data: &SpectralData<T>,
    i: usize,
    j: usize,
    t: &T,
    pi_j: &T,
    control: &TruncationControl,
) -> Result<Transition<T>> {
    let Family::Linear { lambda, beta, .. } = data.spec().family() else {
        unreachable!("only the critical linear process has a continuous spectrum");
    };
    let f = data.to_f64();
    let (lambda, beta, t) = (lambda.to_f64(), beta.to_f64(), t.to_f64());
    let s = lambda / (1.0 + lambda * t);
    let head = (1.0 + lambda * t).powf(-beta);
    let scale = head * pi_j.to_f64().abs();
    // Sum and a bound on its rounding error.
    let eval = |nodes: usize| -> Result<(f64, f64)> {
        let rule = GaussLaguerre::new(nodes, beta - 1.0)?;
        let (mut acc, mut abs, mut err) = (0.0, 0.0, 0.0);
        for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (q, e) = recurrence_values_bounded(f.spec(), i.max(j), &(s * y))?;
            let v = w * q[i] * q[j];
            acc += v;
            abs += v.abs();
            err += w.abs() * (q[i].abs() * e[j] + q[j].abs() * e[i] + e[i] * e[j]);
        }
        Ok((head * acc * pi_j.to_f64(), scale * (f64::EPSILON * abs + err)))
    };
    let nodes = control.quadrature_nodes.max(1);
    let (p, rounding) = eval(nodes)?;
    // Below degree 2 * (nodes / 2) both rules are exact and differ only
    // by rounding, already bounded.
    let half = (nodes / 2).max(1);
    let estimate = if i + j >= 2 * half {
        (p - eval(half)?.0).abs() + rounding
    } else {
        rounding
    };
    let p = T::from_f64(p).ok_or_else(|| Error::Truncation(format!("quadrature produced {p}")))?;
    Ok(Transition {
        p,
        truncation_error_estimate: estimate,
        flagged: estimate > control.tol.max(1e-9),
        terms: nodes,
    })
}

/// `p_ij(t)` for `i, j < states`.
pub fn km_matrix<T: Scalar>(
    data: &SpectralData<T>,
    states: usize,
    t: &T,
    control: &TruncationControl,
) -> Result<Vec<Vec<T>>> {
    (0..states)
        .map(|i| {
            (0..states)
                .map(|j| km_transition(data, i, j, t, control).map(|r| r.p))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn pi_weight_examples() {
        let s = BirthDeathSpec::mm_infinity(rat(3, 1), rat(2, 1)).unwrap();
        assert_eq!(pi_weights(&s, 0).unwrap(), rat(1, 1));
        assert_eq!(pi_weights(&s, 3).unwrap(), rat(27, 8) / rat(6, 1));
        let e = BirthDeathSpec::ehrenfest(4, rat(1, 3)).unwrap();
        assert_eq!(pi_weights(&e, 2).unwrap(), rat(6, 1) * rat(1, 4));
        assert!(pi_weights(&e, 5).is_err());
        let c = BirthDeathSpec::custom(vec![rat(1, 1), rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1), rat(1, 1)])
            .unwrap();
        assert_eq!(pi_weights(&c, 2), Err(Error::VanishingDeathRate { state: 1 }));
    }

    #[test]
    fn stationary_examples() {
        let e = BirthDeathSpec::ehrenfest(2, rat(1, 3)).unwrap();
        assert_eq!(
            stationary_distribution(&e, 10).unwrap().unwrap(),
            vec![rat(4, 9), rat(4, 9), rat(1, 9)]
        );
        let sub = BirthDeathSpec::linear(rat(1, 1), rat(2, 1), rat(2, 1)).unwrap();
        let p = stationary_distribution(&sub, 2).unwrap().unwrap();
        assert_eq!(p, vec![rat(1, 4), rat(1, 4), rat(3, 16)]);
        let sup = BirthDeathSpec::linear(rat(2, 1), rat(1, 1), rat(2, 1)).unwrap();
        assert_eq!(stationary_distribution(&sup, 2).unwrap(), None);
    }

    #[test]
    fn time_zero_is_identity_exactly() {
        let e = BirthDeathSpec::ehrenfest(3, rat(2, 5)).unwrap();
        let d = SpectralData::new(&e, 0).unwrap();
        let m = km_matrix(&d, 4, &rat(0, 1), &TruncationControl::default()).unwrap();
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, if i == j { rat(1, 1) } else { rat(0, 1) });
            }
        }
        let u = BirthDeathSpec::<Rational>::two_urn(4, 5, 3).unwrap();
        let d = SpectralData::new(&u, 0).unwrap();
        let m = km_matrix(&d, 4, &rat(0, 1), &TruncationControl::default()).unwrap();
        assert_eq!(m[2][2], rat(1, 1));
        assert_eq!(m[2][1], rat(0, 1));
    }

    #[test]
    fn mm_infinity_p00() {
        let s = BirthDeathSpec::mm_infinity(1.0, 1.0).unwrap();
        let d = SpectralData::new(&s, 50).unwrap();
        let r = km_transition(&d, 0, 0, &1.0, &TruncationControl::default()).unwrap();
        let expected = (-(1.0 - (-1.0f64).exp())).exp();
        assert!((r.p - expected).abs() < 1e-12, "{} vs {expected}", r.p);
        assert!((r.p - 0.531_463_605_386_615_6).abs() < 1e-12);
        assert!(!r.flagged);
    }

    #[test]
    fn ehrenfest_long_time_limit() {
        let s = BirthDeathSpec::ehrenfest(3, 0.3).unwrap();
        let d = SpectralData::new(&s, 0).unwrap();
        let pi = stationary_distribution(&s, 3).unwrap().unwrap();
        for j in 0..=3 {
            let r = km_transition(&d, 1, j, &60.0, &TruncationControl::default()).unwrap();
            assert!((r.p - pi[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_case_rows_and_start() {
        let s = BirthDeathSpec::linear(1.0, 1.0, 1.5).unwrap();
        let d = SpectralData::new(&s, 0).unwrap();
        let c = TruncationControl::default();
        for i in 0..3 {
            for j in 0..3 {
                let r = km_transition(&d, i, j, &0.0, &c).unwrap();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((r.p - e).abs() < 1e-9, "p_{i}{j}(0) = {}", r.p);
            }
        }
        // p_00(t) = (1 + lambda t)^(-beta) for the critical process.
        let r = km_transition(&d, 0, 0, &0.7, &c).unwrap();
        assert!((r.p - 1.7f64.powf(-1.5)).abs() < 1e-12);
    }

    #[test]
    fn negative_time_rejected() {
        let s = BirthDeathSpec::ehrenfest(2, 0.5).unwrap();
        let d = SpectralData::new(&s, 0).unwrap();
        assert!(km_transition(&d, 0, 0, &-1.0, &TruncationControl::default()).is_err());
    }

    #[test]
    fn estimate_covers_rounding_at_large_states() {
        // M/M/inf: p_i0(t) = (1 - e^(-mu t))^i exp(-rho (1 - e^(-mu t))).
        let (lambda, mu, t) = (1.5, 1.0, 0.5);
        let s = BirthDeathSpec::mm_infinity(lambda, mu).unwrap();
        let d = SpectralData::new(&s, 0).unwrap();
        let c = TruncationControl::default();
        let q = 1.0 - (-mu * t).exp();
        let mut flagged = false;
        for i in 0..45 {
            let r = km_transition(&d, i, 0, &t, &c).unwrap();
            let exact = q.powi(i as i32) * (-lambda / mu * q).exp();
            assert!((r.p - exact).abs() <= r.truncation_error_estimate + 1e-15, "i = {i}");
            flagged |= r.flagged;
        }
        assert!(flagged);
    }
}
