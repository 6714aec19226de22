use crate::error::{Error, Result};
use crate::mvk::Basis;
use crate::scalar::Scalar;

use super::data::{SpectralData, SpectrumKind};
use super::transition::{pi_weights, stationary_distribution};

/// Normalisation of the eigenfunctions `u_i^(l)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenForm {
    /// `u_i^(l) = Q_i(zeta_l) sqrt(psi_l / psi_0)`, orthonormal on the stationary law.
    Stationary,
    /// `u_i^(l) = Q_i(zeta_l) sqrt(psi_l)`, orthonormal against `pi`.
    General,
}

/// Eigenfunction table kept in unscaled form: `u_i^(l) = q[l][i] sqrt(scale_sq[l])`,
/// so that exact backends stay exact.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenTable<T> {
    form: EigenForm,
    zeta: Vec<T>,
    q: Vec<Vec<T>>,
    scale_sq: Vec<T>,
    weights: Vec<T>,
}

/// Builds `levels` eigenfunctions on states `0..states` (both capped by the
/// support for finite families).
pub fn spectral_eigenfunctions<T: Scalar>(
    data: &SpectralData<T>,
    form: EigenForm,
    levels: usize,
    states: usize,
) -> Result<EigenTable<T>> {
    if data.kind() == SpectrumKind::Continuous {
        return Err(Error::Unsupported(
            "eigenfunction tables need a discrete spectrum".into(),
        ));
    }
    let cap = data.support_size().unwrap_or(usize::MAX);
    let levels = levels.min(cap);
    let states = states.min(cap);
    let atoms = (0..levels).map(|l| data.atom(l)).collect::<Result<Vec<_>>>()?;
    let q = atoms
        .iter()
        .map(|(zeta, _)| (0..states).map(|i| data.poly_at(i, zeta)).collect())
        .collect::<Result<Vec<Vec<T>>>>()?;
    let (scale_sq, weights) = match form {
        EigenForm::Stationary => {
            let (zeta0, psi0) = data.atom(0)?;
            if !zeta0.is_zero() || psi0.is_zero() {
                return Err(Error::domain(
                    "the stationary form needs an atom at 0 (psi({0}) > 0)",
                ));
            }
            let p = stationary_distribution(data.spec(), states.saturating_sub(1))?
                .ok_or_else(|| Error::domain("no stationary distribution"))?;
            let s = atoms.iter().map(|(_, psi)| psi.clone() / psi0.clone()).collect();
            (s, p)
        }
        EigenForm::General => {
            let pi = (0..states)
                .map(|i| pi_weights(data.spec(), i))
                .collect::<Result<Vec<T>>>()?;
            (atoms.iter().map(|(_, psi)| psi.clone()).collect(), pi)
        }
    };
    Ok(EigenTable {
        form,
        zeta: atoms.into_iter().map(|(z, _)| z).collect(),
        q,
        scale_sq,
        weights,
    })
}

impl<T: Scalar> EigenTable<T> {
    pub fn form(&self) -> EigenForm {
        self.form
    }

    pub fn levels(&self) -> usize {
        self.q.len()
    }

    pub fn states(&self) -> usize {
        self.weights.len()
    }

    pub fn zeta(&self) -> &[T] {
        &self.zeta
    }

    /// `q[l][i] = Q_i(zeta_l)`.
    pub fn unscaled(&self) -> &[Vec<T>] {
        &self.q
    }

    /// Squared row scales `psi_l / psi_0` or `psi_l`.
    pub fn scale_sq(&self) -> &[T] {
        &self.scale_sq
    }

    /// `p_i` (stationary form) or `pi_i` (general form).
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `u_i^(l)`; needs an exact square root on the rational backend.
    pub fn value(&self, l: usize, i: usize) -> Result<T> {
        let s = self.scale_sq[l].sqrt().ok_or_else(|| {
            Error::Unsupported(format!("sqrt({}) is irrational", self.scale_sq[l]))
        })?;
        Ok(self.q[l][i].clone() * s)
    }

    pub fn rows_f64(&self) -> Vec<Vec<f64>> {
        self.q
            .iter()
            .zip(&self.scale_sq)
            .map(|(row, s)| {
                let s = s.to_f64().sqrt();
                row.iter().map(|v| v.to_f64() * s).collect()
            })
            .collect()
    }

    /// `sum_i q[k][i] q[l][i] w_i`.
    fn gram(&self, k: usize, l: usize) -> T {
        self.q[k]
            .iter()
            .zip(&self.q[l])
            .zip(&self.weights)
            .fold(T::zero(), |acc, ((a, b), w)| acc + a.clone() * b.clone() * w.clone())
    }

    /// `max |sum_i u_i^(k) u_i^(l) w_i - delta_kl|` over the table.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.levels() {
            for l in 0..self.levels() {
                let g = self.gram(k, l).to_f64()
                    * (self.scale_sq[k].to_f64() * self.scale_sq[l].to_f64()).sqrt();
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Exact orthonormality test, avoiding square roots: off-diagonal Gram
    /// entries vanish and `gram(l, l) scale_sq[l] = 1`.
    pub fn is_orthonormal_exact(&self) -> bool {
        (0..self.levels()).all(|k| {
            (0..self.levels()).all(|l| {
                let g = self.gram(k, l);
                if k == l {
                    (g * self.scale_sq[k].clone()).is_one()
                } else {
                    g.is_zero()
                }
            })
        })
    }

    /// The stationary-form table as an orthogonal basis on the stationary
    /// law, with rows `Q_i(zeta_l)` and norms `psi_0 / psi_l`.
    pub fn to_basis(&self) -> Result<Basis<T>> {
        if self.form != EigenForm::Stationary {
            return Err(Error::Unsupported(
                "only the stationary form is a basis on a probability vector".into(),
            ));
        }
        if self.levels() != self.states() {
            return Err(Error::Dimension(format!(
                "{} levels on {} states is not a square basis",
                self.levels(),
                self.states()
            )));
        }
        let a = self.scale_sq.iter().map(|s| T::one() / s.clone()).collect();
        Basis::with_norms(self.weights.clone(), self.q.clone(), a)
    }
}
