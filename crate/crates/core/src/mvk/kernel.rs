use super::eval::{table_series_in, PolyTable};
use super::{Basis, Composition, MultiIndex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::MonomialSpace;

/// `sum_{|n| = degree} Q_n(x) Q_n(y) / h_n` with `h_n = C(N; n+) prod a_l^n_l`.
/// The value depends only on `p`: rescaling or rotating the basis leaves it
/// unchanged.
pub fn reproducing_kernel<T: Scalar>(
    degree: usize,
    x: &Composition,
    y: &Composition,
    basis: &Basis<T>,
) -> Result<T> {
    let d = basis.d();
    let total = x.total();
    if y.total() != total || x.len() != d || y.len() != d {
        return Err(Error::Dimension("compositions must have d entries and equal totals".into()));
    }
    if degree > total {
        return Ok(T::zero());
    }
    let space = MonomialSpace::new(d - 1, total);
    let sx = table_series_in(&space, basis.u(), x.as_slice());
    let sy = table_series_in(&space, basis.u(), y.as_slice());
    Ok(MultiIndex::of_degree(d - 1, total, degree)
        .iter()
        .fold(T::zero(), |acc, n| {
            acc + sx.coeff(n.as_slice()) * sy.coeff(n.as_slice()) / norm(n, basis)
        }))
}

/// `h_n`, the squared norm of `Q_n`.
fn norm<T: Scalar>(n: &MultiIndex, basis: &Basis<T>) -> T {
    n.as_slice()
        .iter()
        .zip(&basis.a()[1..])
        .fold(n.multinomial::<T>(), |h, (&k, a)| h * a.powi(k as i32))
}

/// Kernel matrix over all compositions, one entry per `(x, y)` in lex order.
pub fn kernel_matrix<T: Scalar>(degree: usize, total: usize, basis: &Basis<T>) -> Result<Vec<Vec<T>>> {
    let table = PolyTable::new(basis, total);
    let idx = MultiIndex::of_degree(basis.d() - 1, total, degree);
    let norms: Vec<T> = idx.iter().map(|n| norm(n, basis)).collect();
    let m = table.compositions().len();
    Ok((0..m)
        .map(|i| {
            (0..m)
                .map(|k| {
                    idx.iter().zip(&norms).fold(T::zero(), |acc, (n, h)| {
                        acc + table.value(n.as_slice(), i) * table.value(n.as_slice(), k) / h.clone()
                    })
                })
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::scalar::rat;
    use crate::Rational;

    #[test]
    fn kernel_is_basis_invariant() {
        let helmert = Basis::helmert(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let other = helmert.remixed(&Basis::random_rotation(2, &mut rng)).unwrap();
        for x in Composition::all(2, 3) {
            for y in Composition::all(2, 3) {
                for deg in 0..=2 {
                    let a = reproducing_kernel(deg, &x, &y, &helmert).unwrap();
                    let b = reproducing_kernel(deg, &x, &y, &other).unwrap();
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn kernels_resum_to_delta() {
        let b = Basis::helmert(3).unwrap();
        let comps = Composition::all(3, 3);
        for x in &comps {
            for y in &comps {
                let k: f64 = (0..=3).map(|n| reproducing_kernel(n, x, y, &b).unwrap()).sum();
                let want = if x == y { 1.0 } else { 0.0 };
                assert!((k * y.multinomial_mass(b.p()) - want).abs() < 1e-12);
            }
        }
        assert!((reproducing_kernel(0, &comps[0], &comps[1], &b).unwrap() - 1.0).abs() < 1e-15);
        let m = kernel_matrix(1, 3, &b).unwrap();
        assert!((m[2][4] - reproducing_kernel(1, &comps[2], &comps[4], &b).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn exact_orthogonal_basis_matches_orthonormal() {
        let exact = Basis::orthogonal_from(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        assert!(!exact.is_orthonormal());
        let unit = exact.to_f64().normalized().unwrap();
        let comps = Composition::all(2, 3);
        for deg in 0..=2 {
            let m = kernel_matrix(deg, 2, &exact).unwrap();
            for (i, x) in comps.iter().enumerate() {
                for (k, y) in comps.iter().enumerate() {
                    let want = reproducing_kernel(deg, x, y, &unit).unwrap();
                    assert!((m[i][k].to_f64() - want).abs() < 1e-13);
                }
            }
        }
        let total: Rational = (0..=2)
            .map(|deg| reproducing_kernel(deg, &comps[1], &comps[1], &exact).unwrap())
            .sum();
        assert_eq!(total * comps[1].multinomial_mass(exact.p()), rat(1, 1));
    }
}
