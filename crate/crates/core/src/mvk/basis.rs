use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_json_value, to_json_value, Scalar};

const FLOAT_TOL: f64 = 1e-12;

/// Orthogonal functions `u^(0) = 1, ..., u^(d-1)` on a probability vector
/// `p`, with norms `sum_j u_j^(l) u_j^(m) p_j = a_l delta_lm`.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis<T> {
    p: Vec<T>,
    u: Vec<Vec<T>>,
    a: Vec<T>,
}

impl<T: Scalar> Basis<T> {
    /// Validates `p` and the orthogonality of `u` (stored as `u[l][j]`) and
    /// records the norms.
    pub fn new(p: Vec<T>, u: Vec<Vec<T>>) -> Result<Self> {
        let d = p.len();
        check_probability(&p)?;
        if u.len() != d || u.iter().any(|row| row.len() != d) {
            return Err(Error::Dimension(format!(
                "basis table must be {d}x{d} (functions x categories)"
            )));
        }
        if u[0].iter().any(|v| !(v.clone() - T::one()).is_negligible(FLOAT_TOL)) {
            return Err(Error::domain("u^(0) must be identically 1"));
        }
        let a: Vec<T> = (0..d).map(|l| inner(&u[l], &u[l], &p)).collect();
        for (l, al) in a.iter().enumerate() {
            if al.is_negligible(FLOAT_TOL) {
                return Err(Error::NotOrthogonal {
                    l,
                    m: l,
                    residual: al.to_f64(),
                });
            }
        }
        for l in 0..d {
            for m in l + 1..d {
                let c = inner(&u[l], &u[m], &p);
                let scale = (a[l].to_f64() * a[m].to_f64()).abs().sqrt().max(1.0);
                if !c.is_negligible(FLOAT_TOL * scale) {
                    return Err(Error::NotOrthogonal {
                        l,
                        m,
                        residual: c.to_f64(),
                    });
                }
            }
        }
        Ok(Self { p, u, a })
    }

    /// Like [`Basis::new`] but also checks that the norms equal `a`.
    pub fn with_norms(p: Vec<T>, u: Vec<Vec<T>>, a: Vec<T>) -> Result<Self> {
        let b = Self::new(p, u)?;
        if a.len() != b.a.len() {
            return Err(Error::Dimension("norm vector length".into()));
        }
        for (l, (given, got)) in a.iter().zip(&b.a).enumerate() {
            if !(given.clone() - got.clone()).is_negligible(FLOAT_TOL * got.to_f64().abs().max(1.0)) {
                return Err(Error::NotOrthonormal {
                    index: l,
                    norm: got.to_f64(),
                });
            }
        }
        Ok(b)
    }

    /// Gram-Schmidt on `1, j, j^2, ...` (categories numbered from 1)
    /// against `p`, without normalisation.
    pub fn orthogonal_from(p: Vec<T>) -> Result<Self> {
        check_probability(&p)?;
        let d = p.len();
        let raw: Vec<Vec<T>> = (0..d)
            .map(|k| (0..d).map(|j| T::from_usize(j + 1).powi(k as i32)).collect())
            .collect();
        let u = gram_schmidt(&raw, &p).ok_or_else(|| Error::domain("degenerate probability vector"))?;
        Self::new(p, u)
    }

    /// Gram-Schmidt on `[1, rows...]`, retrying is the caller's business.
    pub fn orthogonal_from_rows(p: Vec<T>, rows: &[Vec<T>]) -> Result<Self> {
        check_probability(&p)?;
        let d = p.len();
        let mut raw = vec![vec![T::one(); d]];
        raw.extend(rows.iter().cloned());
        if raw.len() != d {
            return Err(Error::Dimension(format!("{} extra rows needed", d - 1)));
        }
        let u = gram_schmidt(&raw, &p).ok_or(Error::Singular)?;
        Self::new(p, u)
    }

    /// Random orthogonal basis built exactly from small integer rows.
    pub fn random_orthogonal<R: Rng>(p: Vec<T>, rng: &mut R) -> Result<Self> {
        let d = p.len();
        for _ in 0..64 {
            let rows: Vec<Vec<T>> = (1..d)
                .map(|_| (0..d).map(|_| T::from_i64(rng.random_range(-4..=4))).collect())
                .collect();
            if let Ok(b) = Self::orthogonal_from_rows(p.clone(), &rows) {
                return Ok(b);
            }
        }
        Err(Error::Singular)
    }

    /// Rescales `u^(l)` by `c[l]` (with `c[0]` ignored).
    pub fn scaled(&self, c: &[T]) -> Result<Self> {
        if c.len() != self.d() {
            return Err(Error::Dimension("one factor per basis function".into()));
        }
        let mut u = self.u.clone();
        let mut a = self.a.clone();
        for l in 1..self.d() {
            if c[l].is_zero() {
                return Err(Error::domain("zero scale factor"));
            }
            u[l] = u[l].iter().map(|v| v.clone() * c[l].clone()).collect();
            a[l] = a[l].clone() * c[l].clone() * c[l].clone();
        }
        Ok(Self {
            p: self.p.clone(),
            u,
            a,
        })
    }

    /// Scales each function so its first-category value is 1.
    pub fn with_unit_first_category(&self) -> Result<Self> {
        let mut c = vec![T::one(); self.d()];
        for (l, cl) in c.iter_mut().enumerate().skip(1) {
            let v = &self.u[l][0];
            if v.is_zero() {
                return Err(Error::DualityUnavailable { index: l });
            }
            *cl = T::one() / v.clone();
        }
        self.scaled(&c)
    }

    /// Normalises every function to unit norm; needs exact square roots on
    /// the rational backend.
    pub fn normalized(&self) -> Result<Self> {
        let mut c = vec![T::one(); self.d()];
        for l in 1..self.d() {
            let s = self.a[l].sqrt().ok_or_else(|| {
                Error::Unsupported(format!(
                    "norm a_{l} = {} has no exact square root; use the float backend",
                    self.a[l]
                ))
            })?;
            c[l] = T::one() / s;
        }
        self.scaled(&c)
    }

    /// Applies `u'^(l) = sum_m r[l-1][m-1] u^(m)` to the non-constant rows.
    /// With an orthogonal `r` and an orthonormal basis the result is again
    /// orthonormal.
    pub fn remixed(&self, r: &[Vec<T>]) -> Result<Self> {
        let k = self.d() - 1;
        if r.len() != k || r.iter().any(|row| row.len() != k) {
            return Err(Error::Dimension(format!("remix matrix must be {k}x{k}")));
        }
        let mut u = vec![self.u[0].clone()];
        for row in r {
            u.push(
                (0..self.d())
                    .map(|j| {
                        row.iter()
                            .enumerate()
                            .fold(T::zero(), |acc, (m, c)| acc + c.clone() * self.u[m + 1][j].clone())
                    })
                    .collect(),
            );
        }
        Self::new(self.p.clone(), u)
    }

    pub fn d(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[T] {
        &self.p
    }

    /// `u[l][j] = u_j^(l)`.
    pub fn u(&self) -> &[Vec<T>] {
        &self.u
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    pub fn is_orthonormal(&self) -> bool {
        self.a
            .iter()
            .all(|v| (v.clone() - T::one()).is_negligible(1e-10))
    }

    pub(crate) fn require_orthonormal(&self) -> Result<()> {
        match self
            .a
            .iter()
            .position(|v| !(v.clone() - T::one()).is_negligible(1e-10))
        {
            Some(index) => Err(Error::NotOrthonormal {
                index,
                norm: self.a[index].to_f64(),
            }),
            None => Ok(()),
        }
    }

    pub fn to_f64(&self) -> Basis<f64> {
        let conv = |v: &Vec<T>| v.iter().map(Scalar::to_f64).collect::<Vec<f64>>();
        Basis {
            p: conv(&self.p),
            u: self.u.iter().map(conv).collect(),
            a: conv(&self.a),
        }
    }

    pub fn to_record(&self) -> BasisRecord {
        let conv = |v: &[T]| v.iter().map(to_json_value).collect::<Vec<_>>();
        BasisRecord {
            d: self.d(),
            p: conv(&self.p),
            u: self.u.iter().map(|r| conv(r)).collect(),
            a: Some(conv(&self.a)),
        }
    }

    pub fn from_record(rec: &BasisRecord) -> Result<Self> {
        let conv = |v: &[serde_json::Value]| v.iter().map(from_json_value).collect::<Result<Vec<T>>>();
        if rec.p.len() != rec.d {
            return Err(Error::Dimension(format!("p has {} entries, d = {}", rec.p.len(), rec.d)));
        }
        let p = conv(&rec.p)?;
        let u = rec.u.iter().map(|r| conv(r)).collect::<Result<Vec<_>>>()?;
        match &rec.a {
            Some(a) => Self::with_norms(p, u, conv(a)?),
            None => Self::new(p, u),
        }
    }
}

impl Basis<f64> {
    /// Helmert contrasts on the uniform distribution, normalised.
    pub fn helmert(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain("need at least two categories"));
        }
        let p = vec![1.0 / d as f64; d];
        let mut u = vec![vec![1.0; d]];
        for l in 1..d {
            let scale = (d as f64 / (l * (l + 1)) as f64).sqrt();
            u.push(
                (0..d)
                    .map(|j| match j.cmp(&l) {
                        std::cmp::Ordering::Less => scale,
                        std::cmp::Ordering::Equal => -(l as f64) * scale,
                        std::cmp::Ordering::Greater => 0.0,
                    })
                    .collect(),
            );
        }
        Self::new(p, u)
    }

    /// `p_i = h_i1^2`, `u_i^(l-1) = h_il / sqrt(p_i)` for an orthogonal `H`.
    pub fn from_orthogonal_matrix(h: &DMatrix<f64>) -> Result<Self> {
        let d = h.nrows();
        if h.ncols() != d {
            return Err(Error::Dimension("H must be square".into()));
        }
        let sign = if h[(0, 0)] < 0.0 { -1.0 } else { 1.0 };
        let p: Vec<f64> = (0..d).map(|i| h[(i, 0)] * h[(i, 0)]).collect();
        let u = (0..d)
            .map(|l| {
                (0..d)
                    .map(|i| sign * h[(i, l)] / p[i].sqrt())
                    .collect()
            })
            .collect();
        Self::new(p, u)
    }

    /// Random orthonormal basis on `p`.
    pub fn random_orthonormal<R: Rng>(p: Vec<f64>, rng: &mut R) -> Result<Self> {
        check_probability(&p)?;
        let d = p.len();
        let mut m = DMatrix::<f64>::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        for i in 0..d {
            m[(i, 0)] = p[i].sqrt();
        }
        let q = m.qr().q();
        Self::from_orthogonal_matrix(&q).map(|b| Basis { p, ..b })
    }

    /// Random orthogonal `k x k` matrix (QR of a uniform matrix).
    pub fn random_rotation<R: Rng>(k: usize, rng: &mut R) -> Vec<Vec<f64>> {
        let m = DMatrix::<f64>::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
        let q = m.qr().q();
        (0..k).map(|i| (0..k).map(|j| q[(i, j)]).collect()).collect()
    }
}

/// Orthonormal basis from Gram-Schmidt on monomials. On the rational
/// backend this fails unless every norm is a perfect square.
pub fn basis_orthonormal_from<T: Scalar>(p: Vec<T>) -> Result<Basis<T>> {
    Basis::orthogonal_from(p)?.normalized()
}

/// Serialised basis: `{d, p, u, a}` with rationals as `"num/den"` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisRecord {
    pub d: usize,
    pub p: Vec<serde_json::Value>,
    pub u: Vec<Vec<serde_json::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<serde_json::Value>>,
}

fn inner<T: Scalar>(f: &[T], g: &[T], p: &[T]) -> T {
    f.iter()
        .zip(g)
        .zip(p)
        .fold(T::zero(), |acc, ((a, b), w)| acc + a.clone() * b.clone() * w.clone())
}

fn gram_schmidt<T: Scalar>(raw: &[Vec<T>], p: &[T]) -> Option<Vec<Vec<T>>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(raw.len());
    let mut norms: Vec<T> = Vec::with_capacity(raw.len());
    for v in raw {
        let mut w = v.clone();
        for (e, ne) in out.iter().zip(&norms) {
            let c = inner(v, e, p) / ne.clone();
            for (wi, ei) in w.iter_mut().zip(e) {
                *wi = wi.clone() - c.clone() * ei.clone();
            }
        }
        let nw = inner(&w, &w, p);
        if nw.is_negligible(1e-10) {
            return None;
        }
        out.push(w);
        norms.push(nw);
    }
    Some(out)
}

pub(crate) fn check_probability<T: Scalar>(p: &[T]) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::Probability("need at least two categories".into()));
    }
    if let Some(j) = p.iter().position(|v| *v <= T::zero()) {
        return Err(Error::Probability(format!("p[{j}] = {} is not positive", p[j])));
    }
    let s = p.iter().fold(T::zero(), |a, b| a + b.clone());
    if !(s.clone() - T::one()).is_negligible(FLOAT_TOL) {
        return Err(Error::Probability(format!("entries sum to {s}")));
    }
    Ok(())
}
