use std::sync::Arc;

use rayon::prelude::*;

use super::{Basis, Composition, MultiIndex};
use crate::combinatorics::{binomial, compositions, factorial, falling, multinomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{MonomialSpace, MultiSeries};

/// All coefficients of `prod_j (rows[0][j] + sum_l w_l rows[l][j])^x_j` up
/// to total degree `max_degree`. For a basis `rows[0]` is all ones; other
/// leading rows give the generalised polynomials used by the duality and
/// the spectral expansions. Tables may have more categories than rows.
pub fn table_series<T: Scalar>(rows: &[Vec<T>], x: &[usize], max_degree: usize) -> MultiSeries<T> {
    let space = MonomialSpace::new(rows.len() - 1, max_degree);
    table_series_in(&space, rows, x)
}

pub(crate) fn table_series_in<T: Scalar>(
    space: &Arc<MonomialSpace>,
    rows: &[Vec<T>],
    x: &[usize],
) -> MultiSeries<T> {
    let mut s = MultiSeries::one(space.clone());
    for (j, &k) in x.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let lin: Vec<T> = rows[1..].iter().map(|r| r[j].clone()).collect();
        s.mul_linear_pow(&rows[0][j], &lin, k);
    }
    s
}

/// Coefficient of `prod_l w_l^n_l` in the table generating function.
pub fn mvk_eval_table<T: Scalar>(rows: &[Vec<T>], n: &[usize], x: &[usize]) -> Result<T> {
    if n.len() + 1 != rows.len() {
        return Err(Error::Dimension(format!(
            "index has {} entries for {} table rows",
            n.len(),
            rows.len()
        )));
    }
    if rows.iter().any(|r| r.len() < x.len()) {
        return Err(Error::Dimension("table narrower than the composition".into()));
    }
    let deg: usize = n.iter().sum();
    Ok(table_series(rows, x, deg).coeff(n))
}

fn check_dims<T: Scalar>(n: &MultiIndex, x: &Composition, basis: &Basis<T>) -> Result<()> {
    if x.len() != basis.d() || n.len() + 1 != basis.d() {
        return Err(Error::Dimension(format!(
            "d = {}, composition length {}, index length {}",
            basis.d(),
            x.len(),
            n.len()
        )));
    }
    if x.total() != n.total() {
        return Err(Error::Dimension(format!(
            "|x| = {} but the index was built for N = {}",
            x.total(),
            n.total()
        )));
    }
    Ok(())
}

/// `Q_n(x; u)`: coefficient of `prod w_l^n_l` in `prod_j (1 + sum_l w_l u_j^(l))^x_j`.
pub fn mvk_eval<T: Scalar>(n: &MultiIndex, x: &Composition, basis: &Basis<T>) -> Result<T> {
    check_dims(n, x, basis)?;
    mvk_eval_table(basis.u(), n.as_slice(), x.as_slice())
}

/// `Q_n(x; u)` from the explicit sum over tables `r` (`r_jk`, category `j`,
/// function `k >= 1`) with column sums `n_k`:
/// `prod_j x_j[r_j.] / prod r_jk! * prod (u_j^(k))^r_jk`.
pub fn mvk_eval_explicit<T: Scalar>(n: &MultiIndex, x: &Composition, basis: &Basis<T>) -> Result<T> {
    check_dims(n, x, basis)?;
    let d = basis.d();
    let mut row_used = vec![0usize; d];
    let mut total = T::zero();
    explicit_rec(
        basis,
        n.as_slice(),
        x.as_slice(),
        0,
        &mut row_used,
        T::one(),
        &mut total,
    );
    Ok(total)
}

fn explicit_rec<T: Scalar>(
    basis: &Basis<T>,
    n: &[usize],
    x: &[usize],
    k: usize,
    row_used: &mut Vec<usize>,
    weight: T,
    total: &mut T,
) {
    if k == n.len() {
        let falls = x
            .iter()
            .zip(row_used.iter())
            .fold(T::one(), |acc, (&xj, &r)| acc * falling(&T::from_usize(xj), r));
        *total = total.clone() + weight * falls;
        return;
    }
    // Distribute n_k over the categories.
    for col in compositions(n[k], x.len()) {
        if col.iter().zip(row_used.iter()).zip(x).any(|((c, r), xj)| c + r > *xj) {
            continue;
        }
        let mut w = weight.clone();
        for (j, &c) in col.iter().enumerate() {
            if c > 0 {
                w = w * basis.u()[k + 1][j].powi(c as i32) / factorial::<T>(c);
            }
        }
        for (r, c) in row_used.iter_mut().zip(&col) {
            *r += c;
        }
        explicit_rec(basis, n, x, k + 1, row_used, w, total);
        for (r, c) in row_used.iter_mut().zip(&col) {
            *r -= c;
        }
    }
}

/// Every `Q_n(x)` for `|x| = N`, `|n| <= N`.
#[derive(Clone, Debug)]
pub struct PolyTable<T> {
    total: usize,
    comps: Vec<Composition>,
    series: Vec<MultiSeries<T>>,
}

impl<T: Scalar> PolyTable<T> {
    pub fn new(basis: &Basis<T>, total: usize) -> Self {
        Self::from_rows(basis.u(), basis.d(), total)
    }

    /// Table for raw rows over `categories` categories.
    pub fn from_rows(rows: &[Vec<T>], categories: usize, total: usize) -> Self {
        let space = MonomialSpace::new(rows.len() - 1, total);
        let comps = Composition::all(total, categories);
        let series = comps
            .par_iter()
            .map(|x| table_series_in(&space, rows, x.as_slice()))
            .collect();
        Self {
            total,
            comps,
            series,
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn compositions(&self) -> &[Composition] {
        &self.comps
    }

    pub fn index_of(&self, x: &Composition) -> Option<usize> {
        self.comps.binary_search(x).ok()
    }

    /// `Q_n(x)` with `x` given by position; zero for out-of-range `n`.
    pub fn value(&self, n: &[usize], xi: usize) -> T {
        self.series[xi].coeff(n)
    }

    pub fn get(&self, n: &[usize], x: &Composition) -> T {
        self.index_of(x)
            .map(|i| self.value(n, i))
            .unwrap_or_else(T::zero)
    }
}

/// `sum_x Q_m(x) Q_n(x) m(x; p)` by enumeration.
pub fn mvk_gram<T: Scalar>(basis: &Basis<T>, total: usize, m: &MultiIndex, n: &MultiIndex) -> Result<T> {
    let table = PolyTable::new(basis, total);
    gram_from_table(basis, &table, m, n)
}

pub(crate) fn gram_from_table<T: Scalar>(
    basis: &Basis<T>,
    table: &PolyTable<T>,
    m: &MultiIndex,
    n: &MultiIndex,
) -> Result<T> {
    if m.len() + 1 != basis.d() || n.len() + 1 != basis.d() {
        return Err(Error::Dimension("index length must be d - 1".into()));
    }
    if m.degree() > table.total || n.degree() > table.total {
        return Err(Error::domain("index degree exceeds N"));
    }
    Ok(table
        .comps
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, x)| {
            acc + table.value(m.as_slice(), i)
                * table.value(n.as_slice(), i)
                * x.multinomial_mass(basis.p())
        }))
}

/// `sum_{|n| <= N} C(N; n+)^-1 prod a_j^-n_j Q_n(x) Q_n(y)`.
pub fn mvk_dual_gram<T: Scalar>(
    basis: &Basis<T>,
    total: usize,
    x: &Composition,
    y: &Composition,
) -> Result<T> {
    if x.total() != total || y.total() != total || x.len() != basis.d() || y.len() != basis.d() {
        return Err(Error::Dimension("compositions must have d entries summing to N".into()));
    }
    let d = basis.d();
    let space = MonomialSpace::new(d - 1, total);
    let sx = table_series_in(&space, basis.u(), x.as_slice());
    let sy = table_series_in(&space, basis.u(), y.as_slice());
    let mut acc = T::zero();
    for ((e, qx), (_, qy)) in sx.terms().zip(sy.terms()) {
        let idx = MultiIndex::new(e.to_vec(), total)?;
        let norm = e
            .iter()
            .enumerate()
            .fold(idx.multinomial::<T>(), |acc, (j, &k)| {
                acc * basis.a()[j + 1].powi(k as i32)
            });
        acc = acc + qx.clone() * qy.clone() / norm;
    }
    Ok(acc)
}

/// `C(N, |n|) C(|n|; n) T_0^(N-|n|) prod T_i^n_i` with
/// `T_i(phi) = sum_j p_j phi_j u_j^(i)`.
pub fn mvk_transform<T: Scalar>(n: &MultiIndex, phi: &[T], basis: &Basis<T>, total: usize) -> Result<T> {
    if phi.len() != basis.d() || n.len() + 1 != basis.d() {
        return Err(Error::Dimension("phi must have d entries".into()));
    }
    let deg = n.degree();
    if deg > total {
        return Err(Error::domain("index degree exceeds N"));
    }
    let t: Vec<T> = basis
        .u()
        .iter()
        .map(|row| {
            row.iter()
                .zip(phi)
                .zip(basis.p())
                .fold(T::zero(), |acc, ((u, f), p)| acc + u.clone() * f.clone() * p.clone())
        })
        .collect();
    let mut v = binomial::<T>(total, deg) * multinomial::<T>(n.as_slice()) * t[0].powi((total - deg) as i32);
    for (i, &k) in n.as_slice().iter().enumerate() {
        v = v * t[i + 1].powi(k as i32);
    }
    Ok(v)
}

/// `E[prod phi_j^X_j Q_n(X)]` by enumeration over compositions.
pub fn mvk_transform_bruteforce<T: Scalar>(
    n: &MultiIndex,
    phi: &[T],
    basis: &Basis<T>,
    total: usize,
) -> Result<T> {
    if phi.len() != basis.d() {
        return Err(Error::Dimension("phi must have d entries".into()));
    }
    let mut acc = T::zero();
    for x in Composition::all(total, basis.d()) {
        let q = mvk_eval(n, &x, basis)?;
        let w = x
            .as_slice()
            .iter()
            .zip(phi)
            .fold(x.multinomial_mass(basis.p()), |acc, (&k, f)| acc * f.powi(k as i32));
        acc = acc + w * q;
    }
    Ok(acc)
}

/// Coefficients of `prod_{l=0}^{d-1} (sum_j u_j^(l) v_j)^n_l`, which are
/// `C(N; n+)^-1 C(N; x) Q_n(x)`, for every composition `x` (lex order).
pub fn dual_gf_coefficients<T: Scalar>(n: &MultiIndex, basis: &Basis<T>) -> Result<Vec<(Composition, T)>> {
    if n.len() + 1 != basis.d() {
        return Err(Error::Dimension("index length must be d - 1".into()));
    }
    let d = basis.d();
    let total = n.total();
    let space = MonomialSpace::new(d, total);
    let mut s = MultiSeries::one(space);
    for (l, &k) in n.plus().iter().enumerate() {
        s.mul_linear_pow(&T::zero(), &basis.u()[l], k);
    }
    Ok(Composition::all(total, d)
        .into_iter()
        .map(|x| {
            let c = s.coeff(x.as_slice());
            (x, c)
        })
        .collect())
}

/// Explicit sum for `C(N; n+)^-1 C(N; x) Q_n(x)` over tables `r_il` with
/// row sums `n_i` (`i = 0..d`) and column sums `x_j`:
/// `prod n_i! / prod r_ij! * prod_{i>=1} (u_j^(i))^r_ij`.
pub fn dual_explicit<T: Scalar>(n: &MultiIndex, x: &Composition, basis: &Basis<T>) -> Result<T> {
    check_dims(n, x, basis)?;
    let np = n.plus();
    let mut col_left = x.as_slice().to_vec();
    let mut total = T::zero();
    dual_rec(basis, &np, 0, &mut col_left, T::one(), &mut total);
    Ok(total)
}

fn dual_rec<T: Scalar>(
    basis: &Basis<T>,
    np: &[usize],
    i: usize,
    col_left: &mut Vec<usize>,
    weight: T,
    total: &mut T,
) {
    if i == np.len() {
        if col_left.iter().all(|&c| c == 0) {
            *total = total.clone() + weight;
        }
        return;
    }
    for row in compositions(np[i], col_left.len()) {
        if row.iter().zip(col_left.iter()).any(|(r, c)| r > c) {
            continue;
        }
        let mut w = weight.clone() * multinomial::<T>(&row);
        for (j, &r) in row.iter().enumerate() {
            if r > 0 {
                w = w * basis.u()[i][j].powi(r as i32);
            }
        }
        for (c, r) in col_left.iter_mut().zip(&row) {
            *c -= r;
        }
        dual_rec(basis, np, i + 1, col_left, w, total);
        for (c, r) in col_left.iter_mut().zip(&row) {
            *c += r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvk::basis_orthonormal_from;
    use crate::polys::{krawtchouk_eval, KrawtchoukParams};
    use crate::scalar::{rat, Rational};

    fn exact3() -> Basis<Rational> {
        Basis::new(
            vec![rat(1, 9), rat(4, 9), rat(4, 9)],
            vec![
                vec![rat(1, 1), rat(1, 1), rat(1, 1)],
                vec![rat(2, 1), rat(1, 2), rat(-1, 1)],
                vec![rat(2, 1), rat(-1, 1), rat(1, 2)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn constant_term_is_one() {
        let b = exact3();
        for x in Composition::all(3, 3) {
            assert_eq!(mvk_eval(&MultiIndex::zero(2, 3), &x, &b).unwrap(), rat(1, 1));
        }
    }

    #[test]
    fn two_category_reduces_to_krawtchouk() {
        let p1 = rat(1, 3);
        let b = Basis::new(
            vec![rat(1, 1) - p1.clone(), p1.clone()],
            vec![vec![rat(1, 1), rat(1, 1)], vec![-p1.clone(), rat(1, 1) - p1.clone()]],
        )
        .unwrap();
        let kp = KrawtchoukParams::new(4, p1).unwrap();
        for x2 in 0..=4 {
            let x = Composition::new(vec![4 - x2, x2]);
            for n in 0..=4 {
                let idx = MultiIndex::new(vec![n], 4).unwrap();
                // Q_n carries the 1/n! of the exponential-type generating function.
                let q = mvk_eval(&idx, &x, &b).unwrap() * crate::combinatorics::factorial::<Rational>(n);
                assert_eq!(q, krawtchouk_eval(n, x2, &kp).unwrap());
            }
        }
        let half = basis_orthonormal_from(vec![rat(1, 2), rat(1, 2)]).unwrap();
        let b = half.scaled(&[rat(1, 1), rat(1, 2)]).unwrap();
        let v = mvk_eval(&MultiIndex::new(vec![1], 2).unwrap(), &Composition::new(vec![1, 1]), &b);
        assert_eq!(v.unwrap(), rat(0, 1));
    }

    #[test]
    fn single_trial_is_basis_value() {
        let b = exact3();
        for j in 0..3 {
            for k in 1..3 {
                let mut x = vec![0; 3];
                x[j] = 1;
                let mut n = vec![0; 2];
                n[k - 1] = 1;
                let v = mvk_eval(&MultiIndex::new(n, 1).unwrap(), &Composition::new(x), &b).unwrap();
                assert_eq!(v, b.u()[k][j]);
            }
        }
    }

    #[test]
    fn explicit_matches_generating_function() {
        let b = exact3();
        for x in Composition::all(4, 3) {
            for n in MultiIndex::all(2, 4) {
                assert_eq!(mvk_eval_explicit(&n, &x, &b).unwrap(), mvk_eval(&n, &x, &b).unwrap());
            }
        }
    }

    #[test]
    fn gram_examples() {
        let b = exact3();
        let n10 = MultiIndex::new(vec![1, 0], 2).unwrap();
        let n01 = MultiIndex::new(vec![0, 1], 2).unwrap();
        let z = MultiIndex::zero(2, 2);
        assert_eq!(mvk_gram(&b, 2, &n10, &n10).unwrap(), rat(2, 1));
        assert_eq!(mvk_gram(&b, 2, &n10, &n01).unwrap(), rat(0, 1));
        assert_eq!(mvk_gram(&b, 2, &z, &z).unwrap(), rat(1, 1));
    }

    #[test]
    fn dual_gram_examples() {
        let b = basis_orthonormal_from(vec![rat(1, 2), rat(1, 2)]).unwrap();
        let x = Composition::new(vec![1, 0]);
        let y = Composition::new(vec![0, 1]);
        assert_eq!(mvk_dual_gram(&b, 1, &x, &x).unwrap(), rat(2, 1));
        assert_eq!(mvk_dual_gram(&b, 1, &x, &y).unwrap(), rat(0, 1));
    }

    #[test]
    fn transform_example() {
        let b = basis_orthonormal_from(vec![rat(1, 2), rat(1, 2)]).unwrap();
        let n = MultiIndex::new(vec![1], 2).unwrap();
        let phi = [rat(1, 1), rat(2, 1)];
        assert_eq!(mvk_transform(&n, &phi, &b, 2).unwrap(), rat(3, 2));
        assert_eq!(mvk_transform_bruteforce(&n, &phi, &b, 2).unwrap(), rat(3, 2));
        let ones = [rat(1, 1), rat(1, 1)];
        assert_eq!(mvk_transform(&n, &ones, &b, 2).unwrap(), rat(0, 1));
        assert_eq!(mvk_transform(&MultiIndex::zero(1, 2), &ones, &b, 2).unwrap(), rat(1, 1));
    }

    #[test]
    fn dual_generating_function_and_explicit_form() {
        let b = exact3();
        for n in MultiIndex::all(2, 3) {
            for (x, c) in dual_gf_coefficients(&n, &b).unwrap() {
                let q = mvk_eval(&n, &x, &b).unwrap();
                let lhs = q * multinomial::<Rational>(x.as_slice()) / n.multinomial::<Rational>();
                assert_eq!(lhs, c);
                assert_eq!(dual_explicit(&n, &x, &b).unwrap(), c);
            }
        }
    }

    #[test]
    fn dimension_errors() {
        let b = exact3();
        let n = MultiIndex::new(vec![1], 2).unwrap();
        assert!(mvk_eval(&n, &Composition::new(vec![1, 1, 0]), &b).is_err());
        let n = MultiIndex::new(vec![1, 0], 3).unwrap();
        assert!(mvk_eval(&n, &Composition::new(vec![1, 1, 0]), &b).is_err());
    }
}
