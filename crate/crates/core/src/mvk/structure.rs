use super::eval::PolyTable;
use super::{Basis, Composition, MultiIndex};
use crate::combinatorics::{bounded_indices, compositions, factorial, multinomial};
use crate::error::{Error, Result};
use crate::linalg::fit_monomials;
use crate::scalar::Scalar;

/// `U_l = sum_j u_j^(l) x_j` for `l = 1..d`.
pub fn linear_statistics<T: Scalar>(x: &Composition, basis: &Basis<T>) -> Vec<T> {
    basis.u()[1..]
        .iter()
        .map(|row| {
            row.iter()
                .zip(x.as_slice())
                .fold(T::zero(), |acc, (u, &k)| acc + u.clone() * T::from_usize(k))
        })
        .collect()
}

/// `kappa_l = sum_{j=0}^{d-1} u_l^(j) n_j` (with `n_0` included) for
/// categories `l = 1..d`.
pub fn kappa_statistics<T: Scalar>(n: &MultiIndex, basis: &Basis<T>) -> Vec<T> {
    let np = n.plus();
    (1..basis.d())
        .map(|l| {
            np.iter()
                .enumerate()
                .fold(T::zero(), |acc, (j, &k)| acc + basis.u()[j][l].clone() * T::from_usize(k))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum StructureMode {
    /// `Q_n(x)` as a polynomial in `U_1..U_{d-1}`.
    Primal(MultiIndex),
    /// `C(N; n+)^-1 Q_n(x)` as a polynomial in `kappa`, for fixed `x`;
    /// requires `u_0^(l) = 1` for every `l`.
    Dual(Composition),
}

/// Outcome of an exact interpolation of a polynomial in its statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingTermReport<T> {
    /// Highest total degree with a non-zero coefficient (`None` if identically 0).
    pub degree: Option<usize>,
    pub expected_degree: usize,
    /// Exponent vector that should be the only top-degree monomial.
    pub leading_monomial: Vec<usize>,
    /// All non-zero terms of top degree.
    pub top_terms: Vec<(Vec<usize>, T)>,
    pub leading_coefficient: T,
    /// `1 / prod n_k!` (primal) or `1 / (C(N; x) prod_{l>=1} x_l!)` (dual).
    pub expected_coefficient: T,
    /// Full coefficient list in graded order.
    pub coefficients: Vec<(Vec<usize>, T)>,
}

impl<T: Scalar> LeadingTermReport<T> {
    pub fn passed(&self, tol: f64) -> bool {
        self.degree == Some(self.expected_degree)
            && self.top_terms.len() == 1
            && self.top_terms[0].0 == self.leading_monomial
            && (self.leading_coefficient.clone() - self.expected_coefficient.clone()).is_negligible(tol)
    }
}

const MAX_POINTS: usize = 2_000;

pub fn leading_term_check<T: Scalar>(mode: &StructureMode, basis: &Basis<T>) -> Result<LeadingTermReport<T>> {
    let d = basis.d();
    let (total, target, expected_coefficient) = match mode {
        StructureMode::Primal(n) => {
            if n.len() + 1 != d {
                return Err(Error::Dimension("index length must be d - 1".into()));
            }
            let c = n
                .as_slice()
                .iter()
                .fold(T::one(), |acc, &k| acc / factorial::<T>(k));
            (n.total(), n.as_slice().to_vec(), c)
        }
        StructureMode::Dual(x) => {
            if x.len() != d {
                return Err(Error::Dimension("composition length must be d".into()));
            }
            if let Some(l) = (1..d).find(|&l| !(basis.u()[l][0].clone() - T::one()).is_negligible(1e-12)) {
                return Err(Error::domain(format!(
                    "dual structure needs u_0^(l) = 1 for all l (fails at l = {l})"
                )));
            }
            let tail = &x.as_slice()[1..];
            let c = tail
                .iter()
                .fold(T::one() / multinomial::<T>(x.as_slice()), |acc, &k| {
                    acc / factorial::<T>(k)
                });
            (x.total(), tail.to_vec(), c)
        }
    };
    let exps = bounded_indices(d - 1, total);
    if exps.len() > MAX_POINTS {
        return Err(Error::ScaleExceeded(format!("{} interpolation points", exps.len())));
    }
    let table = PolyTable::new(basis, total);
    let (points, values): (Vec<Vec<T>>, Vec<T>) = match mode {
        StructureMode::Primal(n) => table
            .compositions()
            .iter()
            .enumerate()
            .map(|(i, x)| (linear_statistics(x, basis), table.value(n.as_slice(), i)))
            .unzip(),
        StructureMode::Dual(x) => {
            let xi = table
                .index_of(x)
                .ok_or_else(|| Error::Dimension("composition total does not match".into()))?;
            compositions(total, d)
                .into_iter()
                .map(|np| {
                    let idx = MultiIndex::new(np[1..].to_vec(), total).expect("|n| <= N");
                    let v = table.value(idx.as_slice(), xi) / multinomial::<T>(&np);
                    (kappa_statistics(&idx, basis), v)
                })
                .unzip()
        }
    };
    let coeffs = fit_monomials(&points, &values, &exps)?;
    let tol = if T::EXACT { 0.0 } else { 1e-8 };
    let scale = coeffs.iter().map(|c| c.to_f64().abs()).fold(1.0, f64::max);
    let nonzero = |c: &T| !c.is_negligible(tol * scale);
    let degree = exps
        .iter()
        .zip(&coeffs)
        .filter(|(_, c)| nonzero(c))
        .map(|(e, _)| e.iter().sum::<usize>())
        .max();
    let top_terms: Vec<(Vec<usize>, T)> = exps
        .iter()
        .zip(&coeffs)
        .filter(|(e, c)| Some(e.iter().sum::<usize>()) == degree && nonzero(c))
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    let leading_coefficient = exps
        .iter()
        .position(|e| *e == target)
        .map(|i| coeffs[i].clone())
        .unwrap_or_else(T::zero);
    Ok(LeadingTermReport {
        degree,
        expected_degree: target.iter().sum(),
        leading_monomial: target,
        top_terms,
        leading_coefficient,
        expected_coefficient,
        coefficients: exps.into_iter().zip(coeffs).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn statistics_examples() {
        let b = Basis::new(
            vec![rat(1, 2), rat(1, 2)],
            vec![vec![rat(1, 1), rat(1, 1)], vec![rat(-1, 1), rat(1, 1)]],
        )
        .unwrap();
        assert_eq!(linear_statistics(&Composition::new(vec![1, 1]), &b), vec![rat(0, 1)]);
        let b3 = exact3();
        let x = Composition::new(vec![3, 0, 0]);
        assert_eq!(linear_statistics(&x, &b3), vec![rat(6, 1), rat(6, 1)]);
        let n = MultiIndex::zero(2, 3);
        assert_eq!(kappa_statistics(&n, &b3), vec![rat(3, 1), rat(3, 1)]);
    }

    #[test]
    fn primal_structure() {
        let b = exact3();
        let n = MultiIndex::new(vec![1, 0], 2).unwrap();
        let r = leading_term_check(&StructureMode::Primal(n), &b).unwrap();
        assert!(r.passed(0.0));
        assert_eq!(r.leading_coefficient, rat(1, 1));
        let n = MultiIndex::new(vec![1, 1], 2).unwrap();
        let r = leading_term_check(&StructureMode::Primal(n), &b).unwrap();
        assert!(r.passed(0.0));
        assert_eq!(r.top_terms, vec![(vec![1, 1], rat(1, 1))]);
        let n = MultiIndex::new(vec![2, 1], 4).unwrap();
        let r = leading_term_check(&StructureMode::Primal(n), &b).unwrap();
        assert!(r.passed(0.0));
        assert_eq!(r.leading_coefficient, rat(1, 2));
        let r = leading_term_check(&StructureMode::Primal(MultiIndex::zero(2, 3)), &b).unwrap();
        assert_eq!(r.degree, Some(0));
        assert_eq!(r.coefficients[0].1, rat(1, 1));
    }

    #[test]
    fn dual_structure() {
        let b = exact3().with_unit_first_category().unwrap();
        for x in Composition::all(3, 3) {
            let r = leading_term_check(&StructureMode::Dual(x.clone()), &b).unwrap();
            assert!(r.passed(0.0), "{x}: {r:?}");
        }
        assert!(leading_term_check(&StructureMode::Dual(Composition::new(vec![1, 1, 0])), &exact3()).is_err());
    }
}
