use crate::combinatorics::{binomial, factorial, multinomial, rising};
use crate::error::{Error, Result};
use crate::mvk::mvk_eval_table;
use crate::scalar::Scalar;
use crate::series::PowerSeries;
use crate::spectral::{Family, LinearRegime, SpectralData};

use super::dual::SpectralAssignment;

/// Generating function `sum_m P_m(x) v^m / m! = h(v) e^(x u(v))` of a family
/// in the Meixner class, with `P_m = c_m Q_m` a rescaling of the spectral
/// polynomials and `x = scale * zeta + shift` the family argument.
#[derive(Clone, Debug, PartialEq)]
pub enum MeixnerClass<T> {
    /// `h = e^v`, `u = log(1 - v/nu)`.
    Charlier { nu: T },
    /// `h = (1 - v)^-beta`, `u = log(1 - v/r) - log(1 - v)`; `P_m = (beta)_m M_m`.
    Meixner { beta: T, r: T, ratio: T },
    /// `h = (1 - v)^-beta`, `u = v / (1 - v)`; `P_m = m! L_m`.
    Laguerre { beta: T },
    /// `h = (1 - p v)^N`, `u = log((1 + q v) / (1 - p v))`; `P_m = K_m`.
    Krawtchouk { n: usize, p: T },
}

impl<T: Scalar> MeixnerClass<T> {
    pub fn from_data(data: &SpectralData<T>) -> Result<Self> {
        let spec = data.spec();
        match spec.family() {
            Family::MmInfinity { lambda, mu } => Ok(Self::Charlier {
                nu: lambda.clone() / mu.clone(),
            }),
            Family::Linear { lambda, mu, beta } => Ok(match spec.linear_regime() {
                Some(LinearRegime::Subcritical) => Self::Meixner {
                    beta: beta.clone(),
                    r: lambda.clone() / mu.clone(),
                    ratio: T::one(),
                },
                Some(LinearRegime::Supercritical) => Self::Meixner {
                    beta: beta.clone(),
                    r: mu.clone() / lambda.clone(),
                    ratio: lambda.clone() / mu.clone(),
                },
                _ => Self::Laguerre { beta: beta.clone() },
            }),
            Family::Ehrenfest { n, p } => Ok(Self::Krawtchouk { n: *n, p: p.clone() }),
            Family::TwoUrn { .. } | Family::Custom { .. } => Err(Error::Unsupported(format!(
                "the {} family is not in the Meixner class",
                spec.name()
            ))),
        }
    }

    /// `c_m` in `P_m = c_m Q_m`.
    pub fn class_scale(&self, m: usize) -> T {
        match self {
            Self::Charlier { .. } => T::one(),
            Self::Meixner { beta, ratio, .. } => rising(beta, m) * ratio.powi(m as i32),
            Self::Laguerre { beta } => rising(beta, m),
            Self::Krawtchouk { n, p } => {
                if m > *n {
                    T::zero()
                } else {
                    factorial::<T>(m) * binomial::<T>(*n, m) * (-p.clone()).powi(m as i32)
                }
            }
        }
    }

    /// `log h(v)` to `order`.
    fn log_h(&self, order: usize) -> PowerSeries<T> {
        let one = T::one();
        match self {
            Self::Charlier { .. } => PowerSeries::linear(T::zero(), one, order),
            Self::Meixner { beta, .. } | Self::Laguerre { beta } => PowerSeries::linear(one.clone(), -one, order)
                .ln()
                .scale(&-beta.clone()),
            Self::Krawtchouk { n, p } => PowerSeries::linear(one, -p.clone(), order)
                .ln()
                .scale(&T::from_usize(*n)),
        }
    }

    fn u(&self, order: usize) -> PowerSeries<T> {
        let one = T::one();
        match self {
            Self::Charlier { nu } => {
                PowerSeries::linear(one.clone(), -(one / nu.clone()), order).ln()
            }
            Self::Meixner { r, .. } => {
                let a = PowerSeries::linear(one.clone(), -(one.clone() / r.clone()), order).ln();
                let b = PowerSeries::linear(one.clone(), -one, order).ln();
                a.add(&b.scale(&-T::one()))
            }
            Self::Laguerre { .. } => {
                let mut c = vec![T::one(); order + 1];
                c[0] = T::zero();
                PowerSeries::from_coeffs(c, order)
            }
            Self::Krawtchouk { p, .. } => {
                let q = one.clone() - p.clone();
                let a = PowerSeries::linear(one.clone(), q, order).ln();
                let b = PowerSeries::linear(one, -p.clone(), order).ln();
                a.add(&b.scale(&-T::one()))
            }
        }
    }
}

/// `Q_m^N(s) = m! [v^m] h(v)^N e^(s u(v))`, with `s` the sum of the family
/// arguments of the `N` points.
pub fn meixner_additive_poly<T: Scalar>(m: usize, total: &T, class: &MeixnerClass<T>, particles: usize) -> T {
    let g = class
        .log_h(m)
        .scale(&T::from_usize(particles))
        .add(&class.u(m).scale(total))
        .exp();
    g.coeff(m) * factorial::<T>(m)
}

/// Sum of the family arguments `scale * Z_k + shift`.
pub fn class_argument_total<T: Scalar>(assignment: &SpectralAssignment<T>, data: &SpectralData<T>) -> T {
    let r = data.rescaling();
    assignment
        .points()
        .iter()
        .fold(T::zero(), |acc, z| acc + r.scale.clone() * z.clone() + r.shift.clone())
}

fn class_poly<T: Scalar>(class: &MeixnerClass<T>, m: usize, z: &T, data: &SpectralData<T>) -> Result<T> {
    let c = class.class_scale(m);
    if c.is_zero() {
        return Ok(c);
    }
    Ok(c * data.poly_at(m, z)?)
}

/// `sum_{|m| = m} C(m; m_1..m_N) prod_k P_{m_k}(Z_k)`.
pub fn meixner_convolution<T: Scalar>(
    m: usize,
    assignment: &SpectralAssignment<T>,
    data: &SpectralData<T>,
) -> Result<T> {
    let class = MeixnerClass::from_data(data)?;
    let pts = assignment.points();
    let table = pts
        .iter()
        .map(|z| (0..=m).map(|j| class_poly(&class, j, z, data)).collect())
        .collect::<Result<Vec<Vec<T>>>>()?;
    let mut sum = T::zero();
    for parts in crate::combinatorics::compositions(m, pts.len()) {
        let mut term = multinomial::<T>(&parts);
        for (k, &mk) in parts.iter().enumerate() {
            term = term * table[k][mk].clone();
        }
        sum = sum + term;
    }
    Ok(sum)
}

/// Multiplicity vectors `(x_1, ..., x_m)` with `sum j x_j = m` and `sum x_j <= N`.
fn partitions(m: usize, particles: usize) -> Vec<Vec<usize>> {
    fn rec(j: usize, left: usize, used: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut k = 0;
        while k * j <= left && used + k <= cap {
            cur[j - 1] = k;
            rec(j - 1, left - k * j, used + k, cap, cur, out);
            k += 1;
        }
        cur[j - 1] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; m];
    rec(m, m, 0, particles, &mut cur, &mut out);
    out
}

/// Both sides of the additivity identity for the dual polynomials:
/// `lhs = C(N; n)^-1 sum_x C(N; x) m! / prod j!^x_j Q_n(x; u~)` with
/// `u~_j^(l) = P_j(z_l)`, `n = n(Z)`, evaluated through the primal
/// multivariate generating function; `rhs = Q_m^N(|Z|)`.
pub fn theorem11_sides<T: Scalar>(
    m: usize,
    assignment: &SpectralAssignment<T>,
    data: &SpectralData<T>,
) -> Result<(T, T)> {
    let class = MeixnerClass::from_data(data)?;
    let particles = assignment.len();
    let groups = assignment.grouped();
    let counts: Vec<usize> = groups.iter().map(|g| g.1).collect();
    // rows[l][j] = P_j(z_l) over distinct points l and categories j = 0..=m.
    let rows = groups
        .iter()
        .map(|(z, _)| (0..=m).map(|j| class_poly(&class, j, z, data)).collect())
        .collect::<Result<Vec<Vec<T>>>>()?;
    let n_plus = &counts[1..];
    let mut lhs = T::zero();
    for xs in partitions(m, particles) {
        let mut x = Vec::with_capacity(m + 1);
        x.push(particles - xs.iter().sum::<usize>());
        x.extend_from_slice(&xs);
        let mut w = multinomial::<T>(&x) * factorial::<T>(m);
        for (j, &k) in xs.iter().enumerate() {
            w = w / factorial::<T>(j + 1).powi(k as i32);
        }
        lhs = lhs + w * mvk_eval_table(&rows, n_plus, &x)?;
    }
    let lhs = lhs / multinomial::<T>(&counts);
    let rhs = meixner_additive_poly(m, &class_argument_total(assignment, data), &class, particles);
    Ok((lhs, rhs))
}

/// `lhs - rhs` of [`theorem11_sides`].
pub fn theorem11_identity_check<T: Scalar>(
    m: usize,
    assignment: &SpectralAssignment<T>,
    data: &SpectralData<T>,
) -> Result<T> {
    let (l, r) = theorem11_sides(m, assignment, data)?;
    Ok(l - r)
}
