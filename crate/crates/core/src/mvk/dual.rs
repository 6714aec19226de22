use super::eval::mvk_eval_table;
use super::{mvk_eval, Basis, Composition, MultiIndex};
use crate::combinatorics::multinomial;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The dual system of a basis. Rows are indexed by the dual function `j`
/// (an original category) and columns by the dual category `i` (an
/// original function): `omega[j][i] = u_j^(i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualBasis<T> {
    pub omega: Vec<Vec<T>>,
    /// `omega_hat[j][i] = omega[j][i] / omega[0][i]`.
    pub omega_hat: Vec<Vec<T>>,
    /// `b_i` proportional to `(omega[0][i])^2 / a_i`.
    pub b: Vec<T>,
    /// `sum_i (omega[0][i])^2 / a_i`.
    pub scale: T,
}

impl<T: Scalar> DualBasis<T> {
    /// `omega_hat` as a validated basis on `b`; its norms are `(p_j scale)^-1`.
    pub fn as_basis(&self) -> Result<Basis<T>> {
        Basis::new(self.b.clone(), self.omega_hat.clone())
    }
}

pub fn dual_basis<T: Scalar>(basis: &Basis<T>) -> Result<DualBasis<T>> {
    let d = basis.d();
    let u = basis.u();
    if let Some(i) = (0..d).find(|&i| u[i][0].is_zero()) {
        return Err(Error::DualityUnavailable { index: i });
    }
    let omega: Vec<Vec<T>> = (0..d).map(|j| (0..d).map(|i| u[i][j].clone()).collect()).collect();
    let omega_hat = (0..d)
        .map(|j| (0..d).map(|i| omega[j][i].clone() / omega[0][i].clone()).collect())
        .collect();
    let raw: Vec<T> = (0..d)
        .map(|i| omega[0][i].clone() * omega[0][i].clone() / basis.a()[i].clone())
        .collect();
    let scale = raw.iter().fold(T::zero(), |a, b| a + b.clone());
    let b = raw.into_iter().map(|v| v / scale.clone()).collect();
    Ok(DualBasis {
        omega,
        omega_hat,
        b,
        scale,
    })
}

/// `C(N; n+)^-1 C(N; x) Q_n(x; u) - prod_i (omega_0^(i))^n_i Q*_{x-}(n+; omega_hat)`.
pub fn duality_residual<T: Scalar>(
    n: &MultiIndex,
    x: &Composition,
    basis: &Basis<T>,
    dual: &DualBasis<T>,
) -> Result<T> {
    let lhs = mvk_eval(n, x, basis)? * multinomial::<T>(x.as_slice()) / n.multinomial::<T>();
    let np = n.plus();
    let star = mvk_eval_table(&dual.omega_hat, &x.as_slice()[1..], &np)?;
    let factor = np
        .iter()
        .enumerate()
        .fold(T::one(), |acc, (i, &k)| acc * dual.omega[0][i].powi(k as i32));
    Ok(lhs - factor * star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn duality_holds_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = Basis::random_orthogonal(vec![rat(1, 6), rat(1, 3), rat(1, 2)], &mut rng).unwrap();
        let dual = dual_basis(&b).unwrap();
        let db = dual.as_basis().unwrap();
        for (j, aj) in db.a().iter().enumerate() {
            assert_eq!(aj.clone(), rat(1, 1) / (b.p()[j].clone() * dual.scale.clone()));
        }
        for x in Composition::all(3, 3) {
            for n in MultiIndex::all(2, 3) {
                assert_eq!(duality_residual(&n, &x, &b, &dual).unwrap(), rat(0, 1));
            }
        }
    }

    #[test]
    fn unit_first_category_gives_self_dual_krawtchouk() {
        let (q, p) = (rat(2, 3), rat(1, 3));
        let b = Basis::new(
            vec![q.clone(), p.clone()],
            vec![vec![rat(1, 1), rat(1, 1)], vec![-p.clone(), q]],
        )
        .unwrap()
        .with_unit_first_category()
        .unwrap();
        let dual = dual_basis(&b).unwrap();
        assert_eq!(dual.omega_hat, dual.omega);
        for x in Composition::all(2, 2) {
            for n in MultiIndex::all(1, 2) {
                assert_eq!(duality_residual(&n, &x, &b, &dual).unwrap(), rat(0, 1));
            }
        }
    }

    #[test]
    fn zero_first_category_is_rejected() {
        let b = Basis::<Rational>::new(
            vec![rat(1, 4), rat(1, 2), rat(1, 4)],
            vec![
                vec![rat(1, 1), rat(1, 1), rat(1, 1)],
                vec![rat(-1, 1), rat(0, 1), rat(1, 1)],
                vec![rat(1, 1), rat(-1, 1), rat(1, 1)],
            ],
        )
        .unwrap();
        assert!(dual_basis(&b).is_ok());
        let swapped = Basis::<Rational>::new(
            vec![rat(1, 2), rat(1, 4), rat(1, 4)],
            vec![
                vec![rat(1, 1), rat(1, 1), rat(1, 1)],
                vec![rat(0, 1), rat(-1, 1), rat(1, 1)],
                vec![rat(-1, 1), rat(1, 1), rat(1, 1)],
            ],
        )
        .unwrap();
        assert_eq!(dual_basis(&swapped), Err(Error::DualityUnavailable { index: 1 }));
    }
}
