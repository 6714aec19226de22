//! Invariant suites. Each suite checks one family of identities against an
//! independent evaluation path and reports the worst residual per property.
//! Exact suites run on rationals and pass only with a residual of exactly 0.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, compositions};
use crate::composition::{
    composition_transition, dual_spectral_form, ehrenfest_dtype, ehrenfest_two_color,
    meixner_convolution, product_form_oracle, theorem10_degree_check, theorem11_sides,
    urn_eigen_residual, CompositionProcess, SpectralAssignment, UrnSpec,
};
use crate::error::{Error, Result};
use crate::mvk::eval::gram_from_table;
use crate::mvk::{
    basis_orthonormal_from, dual_basis, duality_residual, leading_term_check, mvk_dual_gram,
    mvk_recurrence_residual, reproducing_kernel, Basis, Composition, MultiIndex, PolyTable,
    RecurrenceKind, StructureMode,
};
use crate::polys::{
    krawtchouk_eval, krawtchouk_norm, krawtchouk_symmetric, meixner_eval,
    meixner_geometric_representation, KrawtchoukParams, TrialSequence,
};
use crate::scalar::{rat, Rational, Scalar};
use crate::sim::{birth_death_expm, empirical_transition, generator_expm, simulate_path, SimConfig};
use crate::spectral::{
    km_transition, pi_weights, BirthDeathSpec, EigenForm, SpectralData, TruncationControl,
};

/// Direction of the bound in a [`CheckResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// `value <= bound` (residuals).
    Max,
    /// `value >= bound` (p-values).
    Min,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckResult {
    pub property: String,
    pub passed: bool,
    /// Worst residual, or the smallest statistic for `min` checks.
    pub value: f64,
    pub bound: f64,
    pub kind: Bound,
    pub cases: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    KrawtchoukOrthogonality,
    SymmetricRepresentation,
    MeixnerProduct,
    MvkOrthogonality,
    Duality,
    Recurrence,
    Structure,
    KernelInvariance,
    Urn,
    KarlinMcGregor,
    Composition,
    MeixnerClass,
    Simulation,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::KrawtchoukOrthogonality,
        Suite::SymmetricRepresentation,
        Suite::MeixnerProduct,
        Suite::MvkOrthogonality,
        Suite::Duality,
        Suite::Recurrence,
        Suite::Structure,
        Suite::KernelInvariance,
        Suite::Urn,
        Suite::KarlinMcGregor,
        Suite::Composition,
        Suite::MeixnerClass,
        Suite::Simulation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::KrawtchoukOrthogonality => "krawtchouk-orthogonality",
            Suite::SymmetricRepresentation => "symmetric-representation",
            Suite::MeixnerProduct => "meixner-product",
            Suite::MvkOrthogonality => "mvk-orthogonality",
            Suite::Duality => "duality",
            Suite::Recurrence => "recurrence",
            Suite::Structure => "structure",
            Suite::KernelInvariance => "kernel-invariance",
            Suite::Urn => "urn",
            Suite::KarlinMcGregor => "karlin-mcgregor",
            Suite::Composition => "composition",
            Suite::MeixnerClass => "meixner-class",
            Suite::Simulation => "simulation",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// Overrides for a suite run. `d` and `n` replace the default instance grid
/// where a suite has one; `float` switches exact suites to `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub seed: u64,
    pub replicates: usize,
    pub float: bool,
    pub tol: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            d: None,
            n: None,
            seed: 20240,
            replicates: 100_000,
            float: false,
            tol: None,
        }
    }
}

struct Check {
    property: String,
    bound: f64,
    kind: Bound,
    value: f64,
    cases: usize,
}

impl Check {
    fn max(property: impl Into<String>, bound: f64) -> Self {
        Self {
            property: property.into(),
            bound,
            kind: Bound::Max,
            value: 0.0,
            cases: 0,
        }
    }

    fn min(property: impl Into<String>, bound: f64) -> Self {
        Self {
            property: property.into(),
            bound,
            kind: Bound::Min,
            value: f64::INFINITY,
            cases: 0,
        }
    }

    fn record(&mut self, v: f64) {
        self.cases += 1;
        let v = if v.is_nan() { f64::INFINITY } else { v };
        self.value = match self.kind {
            Bound::Max => self.value.max(v.abs()),
            Bound::Min => self.value.min(if v.is_infinite() { 0.0 } else { v }),
        };
    }

    /// Records `diff`; on the exact backend any non-zero value counts as at
    /// least the smallest positive float.
    fn diff<T: Scalar>(&mut self, diff: T) {
        let v = if diff.is_zero() {
            0.0
        } else {
            diff.to_f64().abs().max(f64::MIN_POSITIVE)
        };
        self.record(v);
    }

    /// `|got - want| / max(1, |want|)`.
    fn rel<T: Scalar>(&mut self, got: T, want: T) {
        if T::EXACT {
            self.diff(got - want);
        } else {
            let scale = want.to_f64().abs().max(1.0);
            self.record((got - want).to_f64().abs() / scale);
        }
    }

    fn finish(self) -> CheckResult {
        let passed = self.cases > 0
            && match self.kind {
                Bound::Max => self.value <= self.bound,
                Bound::Min => self.value >= self.bound,
            };
        CheckResult {
            property: self.property,
            passed,
            value: if self.cases == 0 { f64::NAN } else { self.value },
            bound: self.bound,
            kind: self.kind,
            cases: self.cases,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    let checks = match suite {
        Suite::KrawtchoukOrthogonality => krawtchouk_orthogonality(opts)?,
        Suite::SymmetricRepresentation => symmetric_representation(opts)?,
        Suite::MeixnerProduct => meixner_product(opts)?,
        Suite::MvkOrthogonality => mvk_orthogonality(opts)?,
        Suite::Duality => duality(opts)?,
        Suite::Recurrence => recurrence(opts)?,
        Suite::Structure => structure(opts)?,
        Suite::KernelInvariance => kernel_invariance(opts)?,
        Suite::Urn => urn(opts)?,
        Suite::KarlinMcGregor => karlin_mcgregor(opts)?,
        Suite::Composition => composition(opts)?,
        Suite::MeixnerClass => meixner_class(opts)?,
        Suite::Simulation => simulation(opts)?,
    };
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        passed: checks.iter().all(|c| c.passed),
        seconds: start.elapsed().as_secs_f64(),
        checks,
    })
}

fn exact_or(opts: &VerifyOptions, float_tol: f64) -> f64 {
    if opts.float {
        opts.tol.unwrap_or(float_tol)
    } else {
        0.0
    }
}

fn krawtchouk_orthogonality(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let nmax = opts.n.unwrap_or(8);
    let ps = [rat(1, 4), rat(1, 3), rat(1, 2)];
    if opts.float {
        let ps: Vec<f64> = ps.iter().map(|p| p.to_f64()).collect();
        krawtchouk_orthogonality_in(nmax, &ps, exact_or(opts, 1e-10))
    } else {
        krawtchouk_orthogonality_in(nmax, &ps, 0.0)
    }
}

fn krawtchouk_orthogonality_in<T: Scalar>(nmax: usize, ps: &[T], tol: f64) -> Result<Vec<CheckResult>> {
    let mut c = Check::max("sum_x b(x) K_m(x) K_n(x) = delta_mn n!^2 C(N,n) (pq)^n", tol);
    for big_n in 1..=nmax {
        for p in ps {
            let params = KrawtchoukParams::new(big_n, p.clone())?;
            let q = T::one() - p.clone();
            let k: Vec<Vec<T>> = (0..=big_n)
                .map(|n| (0..=big_n).map(|x| krawtchouk_eval(n, x, &params)).collect())
                .collect::<Result<_>>()?;
            let w: Vec<T> = (0..=big_n)
                .map(|x| binomial::<T>(big_n, x) * p.powi(x as i32) * q.powi((big_n - x) as i32))
                .collect();
            for m in 0..=big_n {
                for n in 0..=big_n {
                    let s = (0..=big_n).fold(T::zero(), |acc, x| {
                        acc + w[x].clone() * k[m][x].clone() * k[n][x].clone()
                    });
                    let want = if m == n { krawtchouk_norm(n, &params)? } else { T::zero() };
                    c.rel(s, want);
                }
            }
        }
    }
    Ok(vec![c.finish()])
}

fn symmetric_representation(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let nmax = opts.n.unwrap_or(6);
    let mut c = Check::max("n! e_n(xi - p) = K_n(|xi|; N, p) over all trial vectors", 0.0);
    for p in [rat(1, 3), rat(1, 2), rat(2, 5)] {
        let params: Vec<KrawtchoukParams<Rational>> = (1..=nmax)
            .map(|n| KrawtchoukParams::new(n, p.clone()))
            .collect::<Result<_>>()?;
        for big_n in 1..=nmax {
            for bits in 0u32..(1 << big_n) {
                let xi: Vec<u8> = (0..big_n).map(|k| ((bits >> k) & 1) as u8).collect();
                let x = xi.iter().filter(|&&v| v == 1).count();
                let trials = TrialSequence::new(xi, p.clone())?;
                for n in 0..=big_n {
                    let got = krawtchouk_symmetric(n, &trials)?;
                    c.diff(got - krawtchouk_eval(n, x, &params[big_n - 1])?);
                }
            }
        }
    }
    Ok(vec![c.finish()])
}

fn meixner_product(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let window = 40;
    let mut c = Check::max(
        "truncated trial representation (L = 40) equals M_n(X; 1, q)",
        opts.tol.unwrap_or(1e-6),
    );
    for p in [rat(1, 2), rat(1, 3)] {
        let q = rat(1, 1) - p.clone();
        for x in 0..=3usize {
            let mut xi = vec![0u8; window];
            xi[x] = 1;
            let trials = TrialSequence::new(xi, p.clone())?;
            for n in 1..=3 {
                let got = meixner_geometric_representation(n, &trials, window)?;
                c.diff(got - meixner_eval(n, &Rational::from_usize(x), &rat(1, 1), &q)?);
            }
        }
    }
    Ok(vec![c.finish()])
}

/// `p_j = j / (d (d+1) / 2)`.
fn skewed_p<T: Scalar>(d: usize) -> Vec<T> {
    let s = T::from_usize(d * (d + 1) / 2);
    (1..=d).map(|j| T::from_usize(j) / s.clone()).collect()
}

fn orthogonality_checks<T: Scalar>(basis: &Basis<T>, nmax: usize, tol: f64, label: &str) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let mut primal = Check::max(
        format!("{label}: sum_x m(x) Q_m Q_n = delta C(N; n) prod a^n"),
        tol,
    );
    let mut dual = Check::max(format!("{label}: m(x) sum_n Q_n(x) Q_n(y) / h_n = delta_xy"), tol);
    for big_n in 1..=nmax {
        let table = PolyTable::new(basis, big_n);
        let idx = MultiIndex::all(d - 1, big_n);
        for m in &idx {
            for n in &idx {
                let g = gram_from_table(basis, &table, m, n)?;
                let want = if m == n {
                    n.as_slice()
                        .iter()
                        .enumerate()
                        .fold(n.multinomial::<T>(), |acc, (j, &k)| acc * basis.a()[j + 1].powi(k as i32))
                } else {
                    T::zero()
                };
                primal.rel(g, want);
            }
        }
        let comps = Composition::all(big_n, d);
        for x in &comps {
            let mx = x.multinomial_mass(basis.p());
            for y in &comps {
                let v = mvk_dual_gram(basis, big_n, x, y)? * mx.clone();
                dual.rel(v, if x == y { T::one() } else { T::zero() });
            }
        }
    }
    Ok(vec![primal.finish(), dual.finish()])
}

fn mvk_orthogonality(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let float_tol = opts.tol.unwrap_or(1e-10);
    let mut out = Vec::new();
    let grid: Vec<(usize, usize)> = match (opts.d, opts.n) {
        (Some(d), n) => vec![(d, n.unwrap_or(4))],
        (None, Some(n)) => vec![(2, n), (3, n)],
        (None, None) => vec![(2, 5), (3, 5)],
    };
    for (d, nmax) in grid {
        if opts.float {
            let b = Basis::random_orthonormal(skewed_p::<f64>(d), &mut rng)?;
            out.extend(orthogonality_checks(&b, nmax, float_tol, &format!("d={d} N<={nmax} float"))?);
        } else {
            let b = Basis::orthogonal_from(skewed_p::<Rational>(d))?;
            out.extend(orthogonality_checks(&b, nmax, 0.0, &format!("d={d} N<={nmax} exact"))?);
            let b = Basis::random_orthogonal(skewed_p::<Rational>(d), &mut rng)?;
            out.extend(orthogonality_checks(&b, nmax, 0.0, &format!("d={d} N<={nmax} exact random"))?);
        }
    }
    if opts.d.is_none() && opts.n.is_none() {
        let b = Basis::random_orthonormal(skewed_p::<f64>(4), &mut rng)?;
        out.extend(orthogonality_checks(&b, 6, float_tol, "d=4 N<=6 float")?);
    }
    Ok(out)
}

fn duality(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let nmax = opts.n.unwrap_or(4);
    let dims: Vec<usize> = opts.d.map_or(vec![2, 3], |d| vec![d]);
    let mut c = Check::max(
        "C(N; x) Q_n(x; u) / C(N; n) = prod omega_0^n Q*_x(n; omega-hat)",
        opts.tol.unwrap_or(1e-9),
    );
    for d in dims {
        let p = skewed_p::<Rational>(d);
        let mut found = 0;
        let mut attempts = 0;
        while found < 3 {
            attempts += 1;
            if attempts > 64 {
                return Err(Error::Singular);
            }
            let b = Basis::random_orthogonal(p.clone(), &mut rng)?;
            let Ok(dual) = dual_basis(&b) else { continue };
            found += 1;
            for big_n in 0..=nmax {
                for n in MultiIndex::all(d - 1, big_n) {
                    for x in Composition::all(big_n, d) {
                        c.diff(duality_residual(&n, &x, &b, &dual)?);
                    }
                }
            }
        }
    }
    Ok(vec![c.finish()])
}

/// Orthonormal on `(1/9, 4/9, 4/9)` with rational entries.
fn rational_orthonormal3() -> Result<Basis<Rational>> {
    Basis::new(
        vec![rat(1, 9), rat(4, 9), rat(4, 9)],
        vec![
            vec![rat(1, 1), rat(1, 1), rat(1, 1)],
            vec![rat(2, 1), rat(1, 2), rat(-1, 1)],
            vec![rat(2, 1), rat(-1, 1), rat(1, 2)],
        ],
    )
}

fn recurrence_residuals<T: Scalar>(basis: &Basis<T>, nmax: usize, c: &mut [Check; 3]) -> Result<()> {
    let d = basis.d();
    for big_n in 0..=nmax {
        for x in Composition::all(big_n, d) {
            for n in MultiIndex::all(d - 1, big_n) {
                for j in 0..d {
                    c[0].diff(mvk_recurrence_residual(RecurrenceKind::XSide { j }, &n, &x, basis)?);
                    c[2].diff(mvk_recurrence_residual(RecurrenceKind::Dual { i: j }, &n, &x, basis)?);
                }
                for i in 1..d {
                    c[1].diff(mvk_recurrence_residual(RecurrenceKind::USide { i }, &n, &x, basis)?);
                }
            }
        }
    }
    Ok(())
}

fn recurrence(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let nmax = opts.n.unwrap_or(4);
    let names = ["x_j-recurrence", "u^(i)-recurrence", "dual recurrence"];
    let mut exact = names.map(|s| Check::max(format!("{s} (exact)"), 0.0));
    recurrence_residuals(&basis_orthonormal_from(vec![rat(1, 2), rat(1, 2)])?, nmax, &mut exact)?;
    recurrence_residuals(&basis_orthonormal_from(vec![rat(1, 5), rat(4, 5)])?, nmax, &mut exact)?;
    recurrence_residuals(&rational_orthonormal3()?, nmax, &mut exact)?;
    let tol = opts.tol.unwrap_or(1e-10);
    let mut float = names.map(|s| Check::max(format!("{s} (float)"), tol));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    recurrence_residuals(&Basis::helmert(3)?, nmax, &mut float)?;
    recurrence_residuals(&Basis::random_orthonormal(skewed_p::<f64>(3), &mut rng)?, nmax, &mut float)?;
    Ok(exact.into_iter().chain(float).map(Check::finish).collect())
}

fn structure(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let nmax = opts.n.unwrap_or(4);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut bases = vec![
        Basis::orthogonal_from(vec![rat(1, 3), rat(2, 3)])?,
        rational_orthonormal3()?,
        Basis::random_orthogonal(skewed_p::<Rational>(3), &mut rng)?,
    ];
    if let Some(d) = opts.d {
        bases.retain(|b| b.d() == d);
    }
    let mut primal = Check::max("Q_n in U: degree |n|, single top monomial, coefficient 1/prod n!", 0.0);
    let mut dual = Check::max("dual Q in kappa: degree, single top monomial and coefficient", 0.0);
    for b in &bases {
        let unit = b.with_unit_first_category()?;
        for big_n in 0..=nmax {
            for n in MultiIndex::all(b.d() - 1, big_n) {
                let r = leading_term_check(&StructureMode::Primal(n), b)?;
                primal.record(if r.passed(0.0) { 0.0 } else { 1.0 });
            }
            for x in Composition::all(big_n, b.d()) {
                let r = leading_term_check(&StructureMode::Dual(x), &unit)?;
                dual.record(if r.passed(0.0) { 0.0 } else { 1.0 });
            }
        }
    }
    let mut spectral = Check::max(
        "composition dual polynomial in N_j: degree, leading 1/prod x_j!, Z-degree",
        0.0,
    );
    let spec = BirthDeathSpec::linear(rat(1, 1), rat(3, 1), rat(2, 1))?;
    let data = SpectralData::new(&spec, 30)?;
    let cases: [(&[usize], usize); 6] = [
        (&[1], 1),
        (&[1], 3),
        (&[2], 2),
        (&[0, 1], 2),
        (&[1, 1], 3),
        (&[3], 3),
    ];
    for (x, particles) in cases {
        if particles > nmax.max(1) {
            continue;
        }
        let r = theorem10_degree_check(x, particles, &data)?;
        spectral.record(if r.passed(0.0) { 0.0 } else { 1.0 });
    }
    Ok(vec![primal.finish(), dual.finish(), spectral.finish()])
}

fn kernel_invariance(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let big_n = opts.n.unwrap_or(4);
    let d = opts.d.unwrap_or(3);
    let tol = opts.tol.unwrap_or(1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let base = if d == 3 {
        Basis::helmert(3)?
    } else {
        Basis::random_orthonormal(skewed_p::<f64>(d), &mut rng)?
    };
    let comps = Composition::all(big_n, d);
    let reference: Vec<Vec<Vec<f64>>> = (0..=big_n)
        .map(|deg| {
            comps
                .iter()
                .map(|x| comps.iter().map(|y| reproducing_kernel(deg, x, y, &base)).collect())
                .collect()
        })
        .map(|m: Vec<Result<Vec<f64>>>| m.into_iter().collect())
        .collect::<Result<_>>()?;
    let mut inv = Check::max("kernel values agree across 5 random orthonormal remixings", tol);
    for _ in 0..5 {
        let other = base.remixed(&Basis::random_rotation(d - 1, &mut rng))?;
        for (deg, table) in reference.iter().enumerate() {
            for (xi, x) in comps.iter().enumerate() {
                for (yi, y) in comps.iter().enumerate() {
                    inv.record(reproducing_kernel(deg, x, y, &other)? - table[xi][yi]);
                }
            }
        }
    }
    let mut delta = Check::max("m(y) sum_n Q_n(x, y) = delta_xy", tol);
    for (xi, _) in comps.iter().enumerate() {
        for (yi, y) in comps.iter().enumerate() {
            let s: f64 = reference.iter().map(|t| t[xi][yi]).sum();
            let want = if xi == yi { 1.0 } else { 0.0 };
            delta.record(s * y.multinomial_mass(base.p()) - want);
        }
    }
    Ok(vec![inv.finish(), delta.finish()])
}

fn urn(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let balls = opts.n.unwrap_or(4);
    let tol = opts.tol.unwrap_or(1e-8);
    let mut eigen = Check::max("eigenfunction identity of the d-colour urn (exact)", 0.0);
    let mut expm = Check::max("d = 3 spectral expansion vs generator exponential", tol);
    let urns = [
        (vec![rat(1, 3), rat(1, 3), rat(1, 3)], vec![rat(1, 2), rat(1, 4)]),
        (vec![rat(1, 5), rat(3, 10), rat(1, 2)], vec![rat(1, 3), rat(-1, 5)]),
    ];
    for (p, rho) in urns {
        let exact = UrnSpec::new(balls, Basis::orthogonal_from(p)?, rho)?;
        eigen.record(urn_eigen_residual(&exact));
        let u = UrnSpec::new(balls, exact.basis().to_f64(), exact.rho().iter().map(|r| r.to_f64()).collect())?;
        for t in [0.25, 1.0, 3.0] {
            let m = generator_expm(&u, t, 10_000)?;
            for x in m.states() {
                for y in m.states() {
                    expm.record(ehrenfest_dtype(x, y, &t, &u)? - m.get(x, y));
                }
            }
        }
    }
    let mut two = Check::max("d = 2 reduction equals the Krawtchouk two-colour formula", 1e-12);
    for p in [0.5, 0.6, 0.85] {
        let u = UrnSpec::two_colour(balls, p)?;
        for t in [0.1, 0.7, 2.0] {
            for x in u.states() {
                for y in u.states() {
                    let a = ehrenfest_dtype(&x, &y, &t, &u)?;
                    let b = ehrenfest_two_color(x.as_slice()[1], y.as_slice()[1], &t, balls, &p)?;
                    two.record(a - b);
                }
            }
        }
    }
    Ok(vec![eigen.finish(), expm.finish(), two.finish()])
}

/// The birth-death instances used by the one-dimensional suites.
pub fn reference_families() -> Result<Vec<BirthDeathSpec<f64>>> {
    Ok(vec![
        BirthDeathSpec::mm_infinity(1.5, 1.0)?,
        BirthDeathSpec::linear(1.0, 2.0, 1.5)?,
        BirthDeathSpec::linear(2.0, 1.0, 1.0)?,
        BirthDeathSpec::linear(1.0, 1.0, 2.0)?,
        BirthDeathSpec::two_urn(4, 5, 3)?,
        BirthDeathSpec::ehrenfest(5, 0.3)?,
    ])
}

fn is_continuous(spec: &BirthDeathSpec<f64>) -> bool {
    matches!(spec.linear_regime(), Some(crate::spectral::LinearRegime::Critical))
}

/// Error bound beyond which a term is left out of the sums over `k`.
const KM_TERM_ERROR: f64 = 1e-10;

/// `(p_ij(t), error estimate)` for `i < rows`, `j <= cols`.
fn km_block(
    data: &SpectralData<f64>,
    rows: usize,
    cols: usize,
    t: f64,
    control: &TruncationControl,
) -> Result<Vec<Vec<(f64, f64)>>> {
    (0..rows)
        .map(|i| {
            (0..=cols)
                .map(|j| km_transition(data, i, j, &t, control).map(|r| (r.p, r.truncation_error_estimate)))
                .collect()
        })
        .collect()
}

/// `sum_k a_k` over the prefix of terms whose error bounds stay within
/// [`KM_TERM_ERROR`].
fn reliable_sum(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    terms.take_while(|&(_, e)| e <= KM_TERM_ERROR).map(|(v, _)| v).sum()
}

fn karlin_mcgregor(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let control = TruncationControl::default();
    let tol = opts.tol.unwrap_or(1e-8);
    let mut oracle = Check::max("spectral p_ij(t) vs uniformization, i, j <= 5, t in {0.1, 1}", tol);
    let mut quad = Check::max("critical linear case by 64-node quadrature vs uniformization", 1e-6);
    let mut ck = Check::max("Chapman-Kolmogorov, i, j <= 4, s, t in {0.1, 0.5}", 1e-7);
    let mut rev = Check::max("reversibility pi_i p_ij = pi_j p_ji", 1e-10);
    let mut rows = Check::max("row sums in (0, 1], = 1 where a stationary law exists", 1e-8);
    for spec in reference_families()? {
        let data = SpectralData::new(&spec, 40)?;
        let top = spec.max_state().map_or(5, |m| m.min(5));
        let bound = spec.max_state().unwrap_or(200);
        for t in [0.1, 1.0] {
            let m = birth_death_expm(&spec, t, bound)?;
            let target = if is_continuous(&spec) { &mut quad } else { &mut oracle };
            for i in 0..=top {
                for j in 0..=top {
                    let p = km_transition(&data, i, j, &t, &control)?;
                    target.record(p.p - m.get(&i, &j));
                    let q = km_transition(&data, j, i, &t, &control)?;
                    let (pi_i, pi_j) = (pi_weights(&spec, i)?, pi_weights(&spec, j)?);
                    rev.record((pi_i * p.p - pi_j * q.p) / pi_i.max(pi_j).max(1.0));
                }
            }
        }
        // Sums over k stop at the first term whose error bound exceeds
        // KM_TERM_ERROR; the mass left beyond shows up in the residuals.
        let cap = spec.max_state().unwrap_or(80);
        let stationary = data.stationary_exists();
        let small = 4.min(spec.max_state().unwrap_or(4));
        for s in [0.1, 0.5] {
            let left = km_block(&data, small + 1, cap, s, &control)?;
            for row in &left {
                let total = reliable_sum(row.iter().copied());
                rows.record(if !(total > 0.0 && total <= 1.0 + 1e-8) {
                    f64::INFINITY
                } else if stationary {
                    1.0 - total
                } else {
                    0.0
                });
            }
            for t in [0.1, 0.5] {
                let right: Vec<Vec<(f64, f64)>> = (0..=cap)
                    .map(|k| {
                        (0..=small)
                            .map(|j| km_transition(&data, k, j, &t, &control).map(|r| (r.p, r.truncation_error_estimate)))
                            .collect()
                    })
                    .collect::<Result<_>>()?;
                for i in 0..=small {
                    for j in 0..=small {
                        let lhs = reliable_sum((0..=cap).map(|k| {
                            let ((a, ea), (b, eb)) = (left[i][k], right[k][j]);
                            (a * b, a.abs() * eb + ea * b.abs() + ea * eb)
                        }));
                        let rhs = km_transition(&data, i, j, &(s + t), &control)?.p;
                        ck.record(lhs - rhs);
                    }
                }
            }
        }
    }
    Ok(vec![oracle.finish(), quad.finish(), ck.finish(), rev.finish(), rows.finish()])
}

fn composition(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let tol = opts.tol.unwrap_or(1e-8);
    let nmax = opts.n.unwrap_or(3);
    let control = TruncationControl::default();
    let mut stationary = Check::max("stationary-form expansion vs product-form oracle", tol);
    let mut general = Check::max("general-form expansion vs product-form oracle", tol);
    let mut dual = Check::max("dual spectral form vs product-form oracle", tol);
    let mut expm = Check::max("spectral expansion vs generator exponential", tol);
    let bases = [
        BirthDeathSpec::ehrenfest(2, 0.3)?,
        BirthDeathSpec::ehrenfest(3, 0.55)?,
        BirthDeathSpec::two_urn(4, 5, 2)?,
    ];
    for base in bases {
        for particles in 1..=nmax {
            let proc = CompositionProcess::new(base.clone(), particles, None, 0)?;
            let t = 0.5;
            let m = generator_expm(&proc, t, 10_000)?;
            for x in proc.states() {
                for y in proc.states() {
                    let oracle = product_form_oracle(&x, &y, &t, &proc, &control)?.p;
                    let a = composition_transition(&x, &y, &t, &proc, EigenForm::Stationary, 1e-12)?.p;
                    let b = composition_transition(&x, &y, &t, &proc, EigenForm::General, 1e-12)?.p;
                    let c = dual_spectral_form(&x, &y, &t, &proc, 1e-12)?.p;
                    stationary.record(a - oracle);
                    general.record(b - oracle);
                    dual.record(c - oracle);
                    expm.record(a - m.get(&x, &y));
                }
            }
        }
    }
    Ok(vec![stationary.finish(), general.finish(), dual.finish(), expm.finish()])
}

fn meixner_class(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let nmax = opts.n.unwrap_or(3);
    let tol = opts.tol.unwrap_or(1e-9);
    let mut exact = Check::max("additivity identity on atom assignments (exact)", 0.0);
    let mut conv = Check::max("convolution form equals the additive polynomial (exact)", 0.0);
    let mut sampled = Check::max("additivity identity on sampled assignments (relative)", tol);
    let specs = [
        BirthDeathSpec::mm_infinity(rat(3, 2), rat(1, 2))?,
        BirthDeathSpec::linear(rat(1, 1), rat(3, 1), rat(5, 2))?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for spec in specs {
        let data = SpectralData::new(&spec, 40)?;
        let fdata = SpectralData::new(&spec.to_f64(), 40)?;
        for particles in 1..=nmax {
            let atoms = atom_multisets(5, particles);
            for levels in &atoms {
                let a = SpectralAssignment::from_atoms(&data, levels)?;
                for m in 0..=4 {
                    let (l, r) = theorem11_sides(m, &a, &data)?;
                    exact.diff(l - r.clone());
                    conv.diff(meixner_convolution(m, &a, &data)? - r);
                }
            }
            for _ in 0..10 {
                let a = SpectralAssignment::sample(&fdata, particles, &mut rng)?;
                for m in 0..=4 {
                    let (l, r) = theorem11_sides(m, &a, &fdata)?;
                    sampled.rel(l, r);
                }
            }
        }
    }
    Ok(vec![exact.finish(), conv.finish(), sampled.finish()])
}

/// Multisets of size `k` over `0..atoms`, as sorted level lists.
fn atom_multisets(atoms: usize, k: usize) -> Vec<Vec<usize>> {
    compositions(k, atoms)
        .into_iter()
        .map(|c| c.iter().enumerate().flat_map(|(l, &m)| std::iter::repeat_n(l, m)).collect())
        .collect()
}

/// Base process, particle count, initial state and horizon of the
/// simulation suite.
pub fn simulation_instance() -> Result<(CompositionProcess<f64>, Composition, f64)> {
    let base = BirthDeathSpec::ehrenfest(2, 0.4)?;
    Ok((CompositionProcess::new(base, 2, None, 0)?, Composition::new(vec![2, 0, 0]), 1.0))
}

fn simulation(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let (proc, x0, t) = simulation_instance()?;
    let config = SimConfig::new(opts.seed, opts.replicates, t, x0.clone())?;
    let paths = simulate_path(&proc, &config)?;
    let emp = empirical_transition(&paths)?;
    let expected = proc
        .states()
        .into_iter()
        .map(|y| composition_transition(&x0, &y, &t, &proc, EigenForm::Stationary, 1e-12).map(|r| (y, r.p)))
        .collect::<Result<Vec<_>>>()?;
    let mut z = Check::max("every terminal-state frequency within 4 sigma of the spectral value", 4.0);
    z.record(emp.max_z_score(&expected));
    let mut chi = Check::min("chi-square p-value against the spectral law", 1e-3);
    chi.record(emp.chi_square(&expected).p_value);
    let mut overflow = Check::max("overflow fraction", 0.0);
    overflow.record(emp.overflow() as f64 / emp.replicates() as f64);
    let mut total = Check::max("spectral terminal law sums to 1", 1e-12);
    total.record(expected.iter().map(|(_, p)| p).sum::<f64>() - 1.0);
    Ok(vec![z.finish(), chi.finish(), overflow.finish(), total.finish()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::from_name("nope"), None);
    }

    #[test]
    fn small_exact_suites_pass() {
        let opts = VerifyOptions {
            d: Some(3),
            n: Some(2),
            ..Default::default()
        };
        for s in [Suite::MvkOrthogonality, Suite::Duality, Suite::Recurrence] {
            let r = run_suite(s, &opts).unwrap();
            assert!(r.passed, "{r:?}");
            assert!(r.checks.iter().all(|c| c.kind == Bound::Max));
        }
        let r = run_suite(Suite::MvkOrthogonality, &opts).unwrap();
        assert!(r.checks.iter().all(|c| c.value == 0.0));
    }

    #[test]
    fn check_bounds() {
        let mut c = Check::max("x", 0.5);
        c.record(-0.25);
        assert!(c.finish().passed);
        let mut c = Check::max("x", 0.5);
        c.record(f64::NAN);
        assert!(!c.finish().passed);
        let mut c = Check::min("p", 0.01);
        c.record(0.2);
        c.record(0.001);
        let r = c.finish();
        assert!(!r.passed);
        assert_eq!(r.value, 0.001);
        assert!(!Check::max("empty", 1.0).finish().passed);
    }

    #[test]
    fn multisets() {
        assert_eq!(atom_multisets(3, 2).len(), 6);
        assert!(atom_multisets(3, 2).contains(&vec![0, 2]));
    }
}
