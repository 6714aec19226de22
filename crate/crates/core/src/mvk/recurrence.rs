use super::eval::table_series;
use super::{Basis, Composition, MultiIndex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::MultiSeries;

/// `c(i, l, k) = sum_j u_j^(i) u_j^(l) u_j^(k) p_j`.
pub fn c_tensor<T: Scalar>(i: usize, l: usize, k: usize, basis: &Basis<T>) -> Result<T> {
    let d = basis.d();
    if i >= d || l >= d || k >= d {
        return Err(Error::domain(format!("indices ({i}, {l}, {k}) out of range 0..{d}")));
    }
    let u = basis.u();
    Ok((0..d).fold(T::zero(), |acc, j| {
        acc + u[i][j].clone() * u[l][j].clone() * u[k][j].clone() * basis.p()[j].clone()
    }))
}

/// Which recurrence to test. Category `j` is `0..d`, function `i` is
/// `1..d` for the `u`-side system and `0..d` for the dual system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecurrenceKind {
    XSide { j: usize },
    USide { i: usize },
    Dual { i: usize },
}

fn coef<T: Scalar>(s: &MultiSeries<T>, n: &[i64]) -> T {
    if n.iter().any(|&v| v < 0) {
        return T::zero();
    }
    let idx: Vec<usize> = n.iter().map(|&v| v as usize).collect();
    s.coeff(&idx)
}

fn shifted(n: &[usize], minus: Option<usize>, plus: Option<usize>) -> Vec<i64> {
    let mut v: Vec<i64> = n.iter().map(|&k| k as i64).collect();
    if let Some(l) = minus {
        v[l] -= 1;
    }
    if let Some(k) = plus {
        v[k] += 1;
    }
    v
}

/// Left side minus right side of the chosen recurrence at `(n, x)`.
/// `Q` terms with a negative index or degree above `N` count as zero.
pub fn mvk_recurrence_residual<T: Scalar>(
    kind: RecurrenceKind,
    n: &MultiIndex,
    x: &Composition,
    basis: &Basis<T>,
) -> Result<T> {
    basis.require_orthonormal()?;
    let d = basis.d();
    if x.len() != d || n.len() + 1 != d || x.total() != n.total() {
        return Err(Error::Dimension("index/composition do not match the basis".into()));
    }
    let big_n = n.total();
    let u = basis.u();
    let p = basis.p();
    let nn = n.as_slice();
    let s = table_series(u, x.as_slice(), big_n);
    let q = |v: &[i64]| coef(&s, v);
    let q_n = q(&shifted(nn, None, None));
    let free = T::from_usize(big_n - n.degree());
    let m = d - 1;
    match kind {
        RecurrenceKind::XSide { j } => {
            if j >= d {
                return Err(Error::domain(format!("category {j} out of range")));
            }
            let mut rhs = p[j].clone() * free.clone() * q_n.clone();
            for k in 0..m {
                rhs = rhs
                    + T::from_usize(nn[k] + 1) * p[j].clone() * u[k + 1][j].clone()
                        * q(&shifted(nn, None, Some(k)));
                rhs = rhs
                    + (free.clone() + T::one()) * p[j].clone() * u[k + 1][j].clone()
                        * q(&shifted(nn, Some(k), None));
            }
            for l in 0..m {
                for k in 0..m {
                    let c = T::from_usize(nn[k] + 1) - if l == k { T::one() } else { T::zero() };
                    rhs = rhs
                        + c * p[j].clone() * u[l + 1][j].clone() * u[k + 1][j].clone()
                            * q(&shifted(nn, Some(l), Some(k)));
                }
            }
            Ok(T::from_usize(x.as_slice()[j]) * q_n - rhs)
        }
        RecurrenceKind::USide { i } => {
            if i == 0 || i >= d {
                return Err(Error::domain(format!("function index {i} out of range 1..{d}")));
            }
            let ui = x
                .as_slice()
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (j, &xj)| acc + u[i][j].clone() * T::from_usize(xj));
            let mut rhs = T::from_usize(nn[i - 1] + 1) * q(&shifted(nn, None, Some(i - 1)))
                + (free + T::one()) * q(&shifted(nn, Some(i - 1), None));
            for l in 0..m {
                for k in 0..m {
                    let c = T::from_usize(nn[k] + 1) - if l == k { T::one() } else { T::zero() };
                    rhs = rhs + c_tensor(i, l + 1, k + 1, basis)? * c * q(&shifted(nn, Some(l), Some(k)));
                }
            }
            Ok(ui * q_n - rhs)
        }
        RecurrenceKind::Dual { i } => {
            if i >= d {
                return Err(Error::domain(format!("function index {i} out of range 0..{d}")));
            }
            let ni = n.plus()[i];
            let mut rhs = T::zero();
            for j in 0..d {
                let xj = x.as_slice()[j];
                if xj == 0 {
                    continue;
                }
                for l in 0..d {
                    let y = x.moved(j, l).expect("x_j > 0");
                    let qy = table_series(u, y.as_slice(), big_n).coeff(nn);
                    rhs = rhs
                        + T::from_usize(xj) * u[i][j].clone() * u[i][l].clone() * p[l].clone() * qy;
                }
            }
            Ok(T::from_usize(ni) * q_n - rhs)
        }
    }
}
