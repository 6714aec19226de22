//! Dense Gaussian elimination over any [`Scalar`]. With rationals the
//! solution is exact, which is what the interpolation-based structure
//! checks rely on.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves the square system `a x = b`.
pub fn solve<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension(format!("{n}x{n} system expected")));
    }
    let tol = 1e-12 * max_entry(&a).max(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_negligible(tol))
            .max_by(|&r, &s| {
                a[r][col]
                    .to_f64()
                    .abs()
                    .partial_cmp(&a[s][col].to_f64().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or(Error::Singular)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / p.clone();
            for c in col..n {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
            let v = b[col].clone() * f;
            b[r] = b[r].clone() - v;
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc - a[r][c].clone() * x[c].clone();
        }
        x[r] = acc / a[r][r].clone();
    }
    Ok(x)
}

fn max_entry<T: Scalar>(a: &[Vec<T>]) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|v| v.to_f64().abs())
        .fold(0.0, f64::max)
}

/// Coefficients `c_0..c_{k-1}` of the polynomial of degree `< k` through
/// the points `(xs[i], ys[i])`.
pub fn interpolate_univariate<T: Scalar>(xs: &[T], ys: &[T]) -> Result<Vec<T>> {
    let a = xs
        .iter()
        .map(|x| (0..xs.len()).map(|k| x.powi(k as i32)).collect())
        .collect();
    solve(a, ys.to_vec())
}

/// Coefficients of `sum_e c_e prod_v x_v^e_v` through `(points[i], values[i])`.
/// The system must be square.
pub fn fit_monomials<T: Scalar>(points: &[Vec<T>], values: &[T], exps: &[Vec<usize>]) -> Result<Vec<T>> {
    if points.len() != exps.len() || values.len() != points.len() {
        return Err(Error::Dimension(format!(
            "{} points for {} monomials",
            points.len(),
            exps.len()
        )));
    }
    let a = points
        .iter()
        .map(|pt| {
            exps.iter()
                .map(|e| {
                    pt.iter()
                        .zip(e)
                        .fold(T::one(), |acc, (x, &k)| acc * x.powi(k as i32))
                })
                .collect()
        })
        .collect();
    solve(a, values.to_vec())
}
