use crate::combinatorics::multinomial;
use crate::error::{Error, Result};
use crate::mvk::{table_series, Composition};
use crate::scalar::Scalar;
use crate::spectral::{
    km_transition, pi_weights, spectral_eigenfunctions, EigenForm, EigenTable, SpectrumKind,
    TruncationControl,
};

use super::process::CompositionProcess;

/// How a composition transition probability was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Spectral,
    DualSpectral,
    ProductOracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::DualSpectral => "dual-spectral",
            Method::ProductOracle => "product-oracle",
        }
    }
}

/// Composition transition probability with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositionTransition<T> {
    pub p: T,
    pub method: Method,
    /// Size of the contributions from the last block of spectral levels
    /// (zero for finite spectra).
    pub truncation_error_estimate: f64,
    pub flagged: bool,
}

const TAIL_BLOCK: usize = 10;

fn check_time<T: Scalar>(t: &T) -> Result<()> {
    if *t < T::zero() {
        return Err(Error::domain(format!("time t = {t} must be non-negative")));
    }
    Ok(())
}

fn discrete_table<T: Scalar>(
    proc: &CompositionProcess<T>,
    form: EigenForm,
) -> Result<EigenTable<T>> {
    let data = proc.spectral_data()?;
    if data.kind() == SpectrumKind::Continuous {
        return Err(Error::Unsupported(
            "composition transitions need a discrete spectrum".into(),
        ));
    }
    let levels = data.support_size().unwrap_or(data.truncation());
    spectral_eigenfunctions(data, form, levels, proc.categories())
}

fn exp_neg<T: Scalar>(rate: T, t: &T) -> Result<T> {
    if t.is_zero() || rate.is_zero() {
        return Ok(T::one());
    }
    (-(rate * t.clone()))
        .exp()
        .ok_or_else(|| Error::Unsupported("e^(-rate t) needs the float backend".into()))
}

/// Multivariate Krawtchouk expansion of `p(x, y; t)` over the spectral
/// eigenfunctions:
/// `w(y) sum_n e^(-t sum_l n_l zeta_l) C(N; n)^-1 Q_n(x; u) Q_n(y; u)`.
/// The stationary form uses `u = Q sqrt(psi/psi_0)` and `w = m(.; p)`; the
/// general form uses `u = Q sqrt(psi)` and `w = m~(.; pi)`, with `n`
/// ranging over all levels including 0.
pub fn composition_transition<T: Scalar>(
    x: &Composition,
    y: &Composition,
    t: &T,
    proc: &CompositionProcess<T>,
    form: EigenForm,
    tol: f64,
) -> Result<CompositionTransition<T>> {
    check_time(t)?;
    let (x, y) = (proc.normalize(x)?, proc.normalize(y)?);
    let table = discrete_table(proc, form)?;
    let n_total = proc.particles();
    let rows = table.unscaled();
    let sx = table_series(rows, x.as_slice(), n_total);
    let sy = table_series(rows, y.as_slice(), n_total);
    let zeta = table.zeta();
    let scale = table.scale_sq();
    let levels = table.levels();
    let infinite = proc.spectral_data()?.support_size().is_none();
    let tail_from = levels.saturating_sub(TAIL_BLOCK);
    let mut sum = T::zero();
    let mut tail = 0.0;
    for ((n, qx), qy) in sx.terms().zip(sy.terms().map(|(_, v)| v)) {
        if qx.is_zero() || qy.is_zero() {
            continue;
        }
        let n0 = n_total - n.iter().sum::<usize>();
        let mut full = Vec::with_capacity(n.len() + 1);
        full.push(n0);
        full.extend_from_slice(n);
        let mut rate = T::zero();
        let mut weight = T::one() / multinomial::<T>(&full);
        for (l, &k) in full.iter().enumerate() {
            if k > 0 {
                rate = rate + T::from_usize(k) * zeta[l].clone();
                weight = weight * scale[l].powi(k as i32);
            }
        }
        let term = exp_neg(rate, t)? * weight * qx.clone() * qy.clone();
        if infinite && full.iter().enumerate().any(|(l, &k)| k > 0 && l >= tail_from) {
            tail += term.to_f64().abs();
        }
        sum = sum + term;
    }
    let prefactor = y.multinomial_mass(table.weights());
    let tail = tail * prefactor.to_f64().abs();
    Ok(CompositionTransition {
        p: prefactor * sum,
        method: Method::Spectral,
        truncation_error_estimate: tail,
        flagged: tail > tol,
    })
}

/// `m~(y; pi) sum_nu e^(-t sum nu_l zeta_l) Q_x(nu) Q_y(nu) m~(nu; psi)` with
/// the dual polynomials `Q_x(nu) = C(N; nu)^-1 Q_nu(x; u~)`, `u~_i^(l) =
/// Q_i(zeta_l)`, read off the dual generating function
/// `prod_l (sum_i Q_i(zeta_l) v_i)^nu_l`.
pub fn dual_spectral_form<T: Scalar>(
    x: &Composition,
    y: &Composition,
    t: &T,
    proc: &CompositionProcess<T>,
    tol: f64,
) -> Result<CompositionTransition<T>> {
    check_time(t)?;
    let (x, y) = (proc.normalize(x)?, proc.normalize(y)?);
    let table = discrete_table(proc, EigenForm::General)?;
    let n_total = proc.particles();
    let levels = table.levels();
    let d = proc.categories();
    // rows_t[i][l] = Q_i(zeta_l): categories become the generating variables.
    let rows_t: Vec<Vec<T>> = (0..d)
        .map(|i| (0..levels).map(|l| table.unscaled()[l][i].clone()).collect())
        .collect();
    let psi = table.scale_sq();
    let zeta = table.zeta();
    let cx = multinomial::<T>(x.as_slice());
    let cy = multinomial::<T>(y.as_slice());
    let infinite = proc.spectral_data()?.support_size().is_none();
    let tail_from = levels.saturating_sub(TAIL_BLOCK);
    let mut sum = T::zero();
    let mut tail = 0.0;
    for nu in Composition::all(n_total, levels) {
        let h = table_series(&rows_t, nu.as_slice(), n_total);
        let dx = h.coeff(&x.as_slice()[1..]) / cx.clone();
        if dx.is_zero() {
            continue;
        }
        let dy = h.coeff(&y.as_slice()[1..]) / cy.clone();
        if dy.is_zero() {
            continue;
        }
        let mut rate = T::zero();
        for (l, &k) in nu.as_slice().iter().enumerate() {
            if k > 0 {
                rate = rate + T::from_usize(k) * zeta[l].clone();
            }
        }
        let term = exp_neg(rate, t)? * dx * dy * nu.multinomial_mass(psi);
        if infinite && nu.as_slice()[tail_from..].iter().any(|&k| k > 0) {
            tail += term.to_f64().abs();
        }
        sum = sum + term;
    }
    let prefactor = proc.reversible_weight(&y)?;
    let tail = tail * prefactor.to_f64().abs();
    Ok(CompositionTransition {
        p: prefactor * sum,
        method: Method::DualSpectral,
        truncation_error_estimate: tail,
        flagged: tail > tol,
    })
}

/// Upper bound on the labelled assignments enumerated by the product oracle.
pub const ORACLE_MAX_ASSIGNMENTS: usize = 1_000_000;

/// Coefficient of `prod s_j^y_j` in `prod_i (sum_j p_ij(t) s_j)^x_i`,
/// enumerated as the sum over labelled target assignments with counts `y`
/// of `prod_k p_{i_k j_k}(t)`, using one-particle `p_ij(t)` from the
/// spectral sum.
pub fn product_form_oracle<T: Scalar>(
    x: &Composition,
    y: &Composition,
    t: &T,
    proc: &CompositionProcess<T>,
    control: &TruncationControl,
) -> Result<CompositionTransition<T>> {
    check_time(t)?;
    let (x, y) = (proc.normalize(x)?, proc.normalize(y)?);
    let count = multinomial::<f64>(y.as_slice());
    if count > ORACLE_MAX_ASSIGNMENTS as f64 {
        return Err(Error::ScaleExceeded(format!(
            "{count} labelled assignments exceed the oracle bound {ORACLE_MAX_ASSIGNMENTS}"
        )));
    }
    let data = proc.spectral_data()?;
    let d = proc.categories();
    let mut p = vec![vec![T::zero(); d]; d];
    let mut estimate = 0.0;
    let mut flagged = false;
    for (i, row) in p.iter_mut().enumerate() {
        if x.as_slice()[i] == 0 {
            continue;
        }
        for (j, v) in row.iter_mut().enumerate() {
            if y.as_slice()[j] == 0 {
                continue;
            }
            let r = km_transition(data, i, j, t, control)?;
            estimate += r.truncation_error_estimate;
            flagged |= r.flagged;
            *v = r.p;
        }
    }
    let sources: Vec<usize> = expand(x.as_slice());
    let mut targets: Vec<usize> = expand(y.as_slice());
    let mut sum = T::zero();
    loop {
        let mut prod = T::one();
        for (&i, &j) in sources.iter().zip(&targets) {
            prod = prod * p[i][j].clone();
            if prod.is_zero() {
                break;
            }
        }
        sum = sum + prod;
        if !next_permutation(&mut targets) {
            break;
        }
    }
    Ok(CompositionTransition {
        p: sum,
        method: Method::ProductOracle,
        truncation_error_estimate: estimate,
        flagged,
    })
}

fn expand(x: &[usize]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .flat_map(|(j, &k)| std::iter::repeat_n(j, k))
        .collect()
}

/// Lexicographic successor; false after the last permutation.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Single-particle probabilities `p_ij(t)` read off an `N = 1` process.
pub fn single_particle<T: Scalar>(
    proc: &CompositionProcess<T>,
    i: usize,
    j: usize,
    t: &T,
) -> Result<T> {
    km_transition(proc.spectral_data()?, i, j, t, &TruncationControl::default()).map(|r| r.p)
}

/// `pi_j` of the base process.
pub fn base_pi<T: Scalar>(proc: &CompositionProcess<T>, j: usize) -> Result<T> {
    pi_weights(proc.base(), j)
}
