use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::combinatorics::{bounded_indices, factorial};
use crate::error::{Error, Result};
use crate::linalg::{fit_monomials, interpolate_univariate};
use crate::mvk::table_series;
use crate::scalar::Scalar;
use crate::spectral::{SpectralData, SpectrumKind};

/// Spectral points `Z_1, ..., Z_N`, one per particle.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralAssignment<T> {
    z: Vec<T>,
    atoms: Option<Vec<usize>>,
}

impl<T: Scalar> SpectralAssignment<T> {
    /// `Z_k = zeta_{levels[k]}`.
    pub fn from_atoms(data: &SpectralData<T>, levels: &[usize]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::domain("an assignment needs at least one particle"));
        }
        let z = levels.iter().map(|&l| data.zeta(l)).collect::<Result<Vec<T>>>()?;
        Ok(Self {
            z,
            atoms: Some(levels.to_vec()),
        })
    }

    /// Arbitrary points (for instance draws from a continuous spectrum).
    pub fn from_points(z: Vec<T>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::domain("an assignment needs at least one particle"));
        }
        Ok(Self { z, atoms: None })
    }

    /// `N` i.i.d. atoms drawn from `psi` (restricted to the first
    /// `truncation` atoms of an infinite spectrum).
    pub fn sample<R: Rng>(data: &SpectralData<T>, particles: usize, rng: &mut R) -> Result<Self> {
        if data.kind() == SpectrumKind::Continuous {
            return Err(Error::Unsupported("sampling needs a discrete spectrum".into()));
        }
        let masses: Vec<f64> = data.atoms()?.iter().map(|(_, m)| m.to_f64()).collect();
        let dist = WeightedIndex::new(&masses)
            .map_err(|e| Error::Probability(format!("spectral masses: {e}")))?;
        let levels: Vec<usize> = (0..particles).map(|_| dist.sample(rng)).collect();
        Self::from_atoms(data, &levels)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn points(&self) -> &[T] {
        &self.z
    }

    pub fn atoms(&self) -> Option<&[usize]> {
        self.atoms.as_deref()
    }

    /// Distinct points with multiplicities `n_l(Z)`, in order of first appearance.
    pub fn grouped(&self) -> Vec<(T, usize)> {
        let mut out: Vec<(T, usize)> = Vec::new();
        for z in &self.z {
            match out.iter_mut().find(|(v, _)| v == z) {
                Some(entry) => entry.1 += 1,
                None => out.push((z.clone(), 1)),
            }
        }
        out
    }

    /// `n_l(Z)` for `l < levels`; requires an atom assignment.
    pub fn level_counts(&self, levels: usize) -> Result<Vec<usize>> {
        let atoms = self
            .atoms
            .as_ref()
            .ok_or_else(|| Error::domain("the assignment was not built from atoms"))?;
        let mut n = vec![0; levels];
        for &l in atoms {
            if l >= levels {
                return Err(Error::domain(format!("atom {l} beyond {levels} levels")));
            }
            n[l] += 1;
        }
        Ok(n)
    }
}

/// `Q_j(z)` for `j = 0..=max` at each distinct point of the assignment:
/// `rows[j][g]`.
fn poly_rows<T: Scalar>(
    groups: &[(T, usize)],
    max: usize,
    data: &SpectralData<T>,
) -> Result<Vec<Vec<T>>> {
    (0..=max)
        .map(|j| groups.iter().map(|(z, _)| data.poly_at(j, z)).collect())
        .collect()
}

/// `prod_k (v_0 + sum_{j>=1} Q_j(Z_k) v_j)` at a numeric `v` with `v_0 = 1`.
pub fn dual_poly_gf<T: Scalar>(
    v: &[T],
    assignment: &SpectralAssignment<T>,
    data: &SpectralData<T>,
) -> Result<T> {
    if v.first().map(|v0| !v0.is_one()).unwrap_or(true) {
        return Err(Error::domain("the generating function is normalised by v_0 = 1"));
    }
    let mut out = T::one();
    for z in assignment.points() {
        let mut f = T::one();
        for (j, vj) in v.iter().enumerate().skip(1) {
            if !vj.is_zero() {
                f = f + data.poly_at(j, z)? * vj.clone();
            }
        }
        out = out * f;
    }
    Ok(out)
}

/// Dual polynomial indexed by `(x_1, ..., x_J)`: the coefficient of
/// `prod v_j^x_j` in the generating function (1 at `x = 0`).
pub fn dual_poly<T: Scalar>(
    x: &[usize],
    assignment: &SpectralAssignment<T>,
    data: &SpectralData<T>,
) -> Result<T> {
    let deg: usize = x.iter().sum();
    if deg > assignment.len() {
        return Ok(T::zero());
    }
    let groups = assignment.grouped();
    let mut rows = poly_rows(&groups, x.len(), data)?;
    rows[0] = vec![T::one(); groups.len()];
    let counts: Vec<usize> = groups.iter().map(|g| g.1).collect();
    Ok(table_series(&rows, &counts, deg).coeff(x))
}

/// `(sum_k Q_j(Z_k), sum_l n_l Q_j(zeta_l))`: the two defining forms of the
/// statistic `N_j`. The second needs an atom assignment.
pub fn cal_n_statistic<T: Scalar>(
    j: usize,
    assignment: &SpectralAssignment<T>,
    data: &SpectralData<T>,
) -> Result<(T, T)> {
    if j == 0 {
        return Err(Error::domain("N_j is defined for j >= 1"));
    }
    let mut by_particle = T::zero();
    for z in assignment.points() {
        by_particle = by_particle + data.poly_at(j, z)?;
    }
    let atoms = assignment
        .atoms()
        .ok_or_else(|| Error::domain("the level form needs an atom assignment"))?;
    let levels = atoms.iter().max().map(|m| m + 1).unwrap_or(0);
    let counts = assignment.level_counts(levels)?;
    let mut by_level = T::zero();
    for (l, &n) in counts.iter().enumerate() {
        if n > 0 {
            by_level = by_level + T::from_usize(n) * data.poly(j, l)?;
        }
    }
    Ok((by_particle, by_level))
}

/// Result of expressing a dual polynomial through the statistics `N_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeReport<T> {
    pub index: Vec<usize>,
    /// Number of statistics `N_1, ..., N_J` used in the fit.
    pub statistics: usize,
    /// `(exponent of (N_1, ..., N_J), coefficient)` for non-zero coefficients.
    pub coefficients: Vec<(Vec<usize>, T)>,
    pub degree: usize,
    pub expected_degree: usize,
    pub leading: Vec<(Vec<usize>, T)>,
    /// `prod N_j^x_j` with coefficient `1 / prod x_j!`.
    pub expected_leading: (Vec<usize>, T),
    /// Largest misfit on assignments not used to build the fit.
    pub fit_residual: f64,
    pub z_degree: usize,
    pub expected_z_degree: usize,
}

impl<T: Scalar> DegreeReport<T> {
    pub fn passed(&self, tol: f64) -> bool {
        self.degree == self.expected_degree
            && self.z_degree == self.expected_z_degree
            && self.leading.len() == 1
            && self.leading[0].0 == self.expected_leading.0
            && (self.leading[0].1.clone() - self.expected_leading.1.clone()).is_negligible(tol)
            && self.fit_residual <= tol
    }
}

const MAX_POOL: usize = 20_000;

/// Expresses the dual polynomial indexed by `x = (x_1, ..., x_J)` in
/// monomials of `N_1, N_2, ...` by exact interpolation over atom
/// assignments of `particles` points, and measures its total degree in `Z`
/// by univariate interpolation along a line.
pub fn theorem10_degree_check<T: Scalar>(
    x: &[usize],
    particles: usize,
    data: &SpectralData<T>,
) -> Result<DegreeReport<T>> {
    if data.kind() == SpectrumKind::Continuous {
        return Err(Error::Unsupported("the N_j fit needs a discrete spectrum".into()));
    }
    let deg: usize = x.iter().sum();
    if deg > particles {
        return Err(Error::domain(format!(
            "|x| = {deg} exceeds the number of particles {particles}"
        )));
    }
    let z_deg: usize = x.iter().enumerate().map(|(i, &k)| (i + 1) * k).sum();
    let support = data.support_size();
    let stats = match support {
        Some(s) => z_deg.min(s - 1),
        None => z_deg,
    };
    let exps = bounded_indices(stats, deg);
    let mut tail = x.to_vec();
    tail.resize(stats.max(x.len()), 0);
    let expected_exp: Vec<usize> = tail[..stats].to_vec();
    let expected_coef =
        T::one() / x.iter().fold(T::one(), |acc, &k| acc * factorial::<T>(k));

    // Candidate assignments: multisets of `particles` atoms from a growing pool.
    let mut atoms = support.unwrap_or(stats + deg + 2).max(2);
    let (points, values, rest) = loop {
        let pool = multisets(atoms, particles, MAX_POOL);
        let mut feats = Vec::with_capacity(pool.len());
        for levels in &pool {
            let a = SpectralAssignment::from_atoms(data, levels)?;
            let mut nj = Vec::with_capacity(stats);
            for j in 1..=stats {
                nj.push(cal_n_statistic(j, &a, data)?.0);
            }
            feats.push((nj, dual_poly(x, &a, data)?));
        }
        if let Some(sel) = independent_rows(&feats, &exps) {
            break sel;
        }
        match support {
            Some(_) => return Err(Error::Singular),
            None if atoms < 60 => atoms += 4,
            None => return Err(Error::Singular),
        }
    };
    let coef = fit_monomials(&points, &values, &exps)?;
    let mut fit_residual: f64 = 0.0;
    for (pt, v) in &rest {
        let fit = exps.iter().zip(&coef).fold(T::zero(), |acc, (e, c)| {
            acc + c.clone()
                * pt.iter()
                    .zip(e)
                    .fold(T::one(), |m, (b, &k)| m * b.powi(k as i32))
        });
        fit_residual = fit_residual.max((fit - v.clone()).to_f64().abs());
    }
    let tol = if T::EXACT { 0.0 } else { 1e-8 };
    let coefficients: Vec<(Vec<usize>, T)> = exps
        .iter()
        .cloned()
        .zip(coef)
        .filter(|(_, c)| !c.is_negligible(tol))
        .collect();
    let degree = coefficients
        .iter()
        .map(|(e, _)| e.iter().sum::<usize>())
        .max()
        .unwrap_or(0);
    let leading = coefficients
        .iter()
        .filter(|(e, _)| e.iter().sum::<usize>() == degree)
        .cloned()
        .collect();
    Ok(DegreeReport {
        index: x.to_vec(),
        statistics: stats,
        coefficients,
        degree,
        expected_degree: deg,
        leading,
        expected_leading: (expected_exp, expected_coef),
        fit_residual,
        z_degree: z_degree(x, particles, z_deg, data, tol)?,
        expected_z_degree: z_deg,
    })
}

type Selection<T> = (Vec<Vec<T>>, Vec<T>, Vec<(Vec<T>, T)>);

/// Picks rows whose monomial evaluations are linearly independent until the
/// system is square; the remaining rows are kept for validation.
fn independent_rows<T: Scalar>(feats: &[(Vec<T>, T)], exps: &[Vec<usize>]) -> Option<Selection<T>> {
    let k = exps.len();
    let tol = if T::EXACT { 0.0 } else { 1e-9 };
    let mut echelon: Vec<(usize, Vec<T>)> = Vec::new();
    let (mut pts, mut vals, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for (pt, v) in feats {
        if echelon.len() == k {
            rest.push((pt.clone(), v.clone()));
            continue;
        }
        let mut row: Vec<T> = exps
            .iter()
            .map(|e| pt.iter().zip(e).fold(T::one(), |m, (b, &p)| m * b.powi(p as i32)))
            .collect();
        for (pivot, basis) in &echelon {
            let f = row[*pivot].clone() / basis[*pivot].clone();
            if !f.is_zero() {
                for (r, b) in row.iter_mut().zip(basis) {
                    *r = r.clone() - f.clone() * b.clone();
                }
            }
        }
        let scale = row.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
        match row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_negligible(tol * scale.max(1.0)))
            .max_by(|a, b| a.1.to_f64().abs().total_cmp(&b.1.to_f64().abs()))
            .map(|(i, _)| i)
        {
            Some(pivot) => {
                echelon.push((pivot, row));
                pts.push(pt.clone());
                vals.push(v.clone());
            }
            None => rest.push((pt.clone(), v.clone())),
        }
    }
    (echelon.len() == k).then_some((pts, vals, rest))
}

/// Multisets of size `size` from `0..atoms`, at most `cap` of them.
fn multisets(atoms: usize, size: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; size];
    loop {
        out.push(cur.clone());
        if out.len() >= cap {
            return out;
        }
        // Next non-decreasing sequence.
        let mut i = size;
        while i > 0 && cur[i - 1] == atoms - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        let v = cur[i - 1] + 1;
        for c in &mut cur[i - 1..] {
            *c = v;
        }
    }
}

/// Degree in `s` of the dual polynomial along `Z_k = k + 1 + s (k + 2)`.
fn z_degree<T: Scalar>(
    x: &[usize],
    particles: usize,
    bound: usize,
    data: &SpectralData<T>,
    tol: f64,
) -> Result<usize> {
    let samples = bound + 2;
    let mut ss = Vec::with_capacity(samples);
    let mut vs = Vec::with_capacity(samples);
    for s in 0..samples {
        let st = T::from_usize(s);
        let z = (0..particles)
            .map(|k| T::from_usize(k + 1) + st.clone() * T::from_usize(k + 2))
            .collect();
        let a = SpectralAssignment::from_points(z)?;
        ss.push(st);
        vs.push(dual_poly(x, &a, data)?);
    }
    let c = interpolate_univariate(&ss, &vs)?;
    let scale = c.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max).max(1.0);
    Ok(c
        .iter()
        .rposition(|v| !v.is_negligible(tol * scale))
        .unwrap_or(0))
}
