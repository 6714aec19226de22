use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use krawtchouk::composition::{
    composition_transition, dual_spectral_form, ehrenfest_dtype, product_form_oracle, CompositionProcess,
    UrnSpec,
};
use krawtchouk::io::{CompositionTransitionRecord, SpecFile, TransitionRecord, TruncationRecord};
use krawtchouk::mvk::Composition;
use krawtchouk::sim::{
    birth_death_expm, empirical_transition, generator_expm, simulate_path, ExpmMatrix, JumpProcess, SimConfig,
    MAX_EXPM_STATES,
};
use krawtchouk::spectral::{km_transition, BirthDeathSpec, EigenForm, SpectralData, TruncationControl};
use serde_json::json;

use crate::output::{joined, num, Output};
use crate::records::{CompareReport, CompareRow};
use crate::{literal, read_file, CliError, CliResult, Global, Status};

/// Default truncation target of spectral sums.
const DEFAULT_TOL: f64 = 1e-12;
/// Default bound for `compare`.
const COMPARE_TOL: f64 = 1e-8;
/// State bound of the uniformization oracle for infinite one-dimensional
/// chains.
const DEFAULT_BOUND: usize = 200;
/// States `0..=DEFAULT_PAIRS` are listed for infinite chains when no pair
/// is given.
const DEFAULT_PAIRS: usize = 5;
/// Largest overflow fraction for which a simulated row is compared.
const MAX_OVERFLOW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Spectral expansion (Karlin-McGregor, multivariate Krawtchouk or urn).
    Spectral,
    /// Dual-polynomial form of the composition expansion.
    DualSpectral,
    /// Sum over labelled particle paths of one-particle probabilities.
    ProductOracle,
    /// Uniformized generator exponential.
    Expm,
    /// Simulation frequencies (`compare` only).
    Empirical,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::DualSpectral => "dual-spectral",
            Method::ProductOracle => "product-oracle",
            Method::Expm => "expm",
            Method::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Stationary,
    General,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Process, composition or urn spec file.
    #[arg(long)]
    pub spec: PathBuf,
    /// Time; `a/b` or a decimal.
    #[arg(long)]
    pub t: String,
    /// Start state (an integer for processes, `x0,x1,...` otherwise); all
    /// pairs when omitted.
    #[arg(long, requires = "y")]
    pub x: Option<String>,
    #[arg(long, requires = "x")]
    pub y: Option<String>,
}

#[derive(Debug, Args)]
pub struct TransitionArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Method::Spectral)]
    pub method: Method,
    /// Eigenfunction form of the composition expansion.
    #[arg(long, value_enum, default_value_t = Form::Stationary)]
    pub form: Form,
}

enum Model {
    Process(BirthDeathSpec<f64>, TruncationRecord),
    Composition(CompositionProcess<f64>, TruncationRecord),
    Urn(UrnSpec<f64>),
}

fn load(path: &PathBuf, float: bool) -> CliResult<Model> {
    let v: serde_json::Value =
        serde_json::from_str(&read_file(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    literal::check_spec(&v, float)?;
    Ok(match SpecFile::from_value(v)? {
        SpecFile::Process(r) => Model::Process(r.build()?, r.truncation.clone()),
        SpecFile::Composition(r) => Model::Composition(r.build()?, r.truncation()),
        SpecFile::Urn(r) => Model::Urn(r.build()?),
    })
}

/// One computed probability.
struct Entry {
    x: Vec<usize>,
    y: Vec<usize>,
    p: f64,
    estimate: f64,
    flagged: bool,
}

struct Ctx<'a> {
    model: &'a Model,
    t: f64,
    tol: f64,
    form: EigenForm,
}

impl Ctx<'_> {
    fn control(&self, tr: &TruncationRecord) -> TruncationControl {
        tr.control(self.tol)
    }

    /// State pairs from `--x/--y`, or all of them.
    fn pairs(&self, c: &Common) -> CliResult<Vec<(Vec<usize>, Vec<usize>)>> {
        if let (Some(x), Some(y)) = (&c.x, &c.y) {
            let (x, y) = (literal::counts(x, "x")?, literal::counts(y, "y")?);
            return Ok(vec![(self.canonical(x)?, self.canonical(y)?)]);
        }
        let states: Vec<Vec<usize>> = match self.model {
            Model::Process(spec, _) => (0..=spec.max_state().unwrap_or(DEFAULT_PAIRS)).map(|i| vec![i]).collect(),
            Model::Composition(p, _) => p.states().into_iter().map(Composition::into_vec).collect(),
            Model::Urn(u) => u.states().into_iter().map(Composition::into_vec).collect(),
        };
        Ok(states
            .iter()
            .flat_map(|x| states.iter().map(move |y| (x.clone(), y.clone())))
            .collect())
    }

    fn canonical(&self, x: Vec<usize>) -> CliResult<Vec<usize>> {
        match self.model {
            Model::Process(..) if x.len() != 1 => {
                Err(CliError::input("a one-dimensional process takes a single integer state"))
            }
            Model::Composition(p, _) => Ok(p.normalize(&Composition::new(x))?.into_vec()),
            Model::Urn(u) if x.len() != u.colours() || x.iter().sum::<usize>() != u.balls() => Err(CliError::input(
                format!("urn states need {} entries summing to {}", u.colours(), u.balls()),
            )),
            _ => Ok(x),
        }
    }

    fn compute(&self, method: Method, pairs: &[(Vec<usize>, Vec<usize>)]) -> CliResult<Vec<Entry>> {
        let t = self.t;
        if method == Method::Expm {
            let m = self.expm()?;
            return Ok(pairs
                .iter()
                .map(|(x, y)| {
                    let (p, lost) = m.get(x, y);
                    Entry {
                        x: x.clone(),
                        y: y.clone(),
                        p,
                        estimate: lost,
                        flagged: lost > self.tol.max(1e-12),
                    }
                })
                .collect());
        }
        let unavailable = || {
            CliError::input(format!("method {} is not available for this spec", method.name()))
        };
        let mut out = Vec::with_capacity(pairs.len());
        match self.model {
            Model::Process(spec, tr) => {
                if method != Method::Spectral {
                    return Err(unavailable());
                }
                let data = SpectralData::new(spec, tr.levels())?;
                let control = self.control(tr);
                for (x, y) in pairs {
                    let r = km_transition(&data, x[0], y[0], &t, &control)?;
                    out.push(entry(x, y, r.p, r.truncation_error_estimate, r.flagged));
                }
            }
            Model::Composition(proc, tr) => {
                let control = self.control(tr);
                for (x, y) in pairs {
                    let (cx, cy) = (Composition::new(x.clone()), Composition::new(y.clone()));
                    let r = match method {
                        Method::Spectral => composition_transition(&cx, &cy, &t, proc, self.form, self.tol),
                        Method::DualSpectral => dual_spectral_form(&cx, &cy, &t, proc, self.tol),
                        Method::ProductOracle => product_form_oracle(&cx, &cy, &t, proc, &control),
                        _ => return Err(unavailable()),
                    }?;
                    out.push(entry(x, y, r.p, r.truncation_error_estimate, r.flagged));
                }
            }
            Model::Urn(urn) => {
                if method != Method::Spectral {
                    return Err(unavailable());
                }
                for (x, y) in pairs {
                    let p = ehrenfest_dtype(&Composition::new(x.clone()), &Composition::new(y.clone()), &t, urn)?;
                    out.push(entry(x, y, p, 0.0, false));
                }
            }
        }
        Ok(out)
    }

    fn expm(&self) -> CliResult<Expm> {
        Ok(match self.model {
            Model::Process(spec, tr) => Expm::Line(birth_death_expm(spec, self.t, tr.bound.unwrap_or(DEFAULT_BOUND))?),
            Model::Composition(p, _) => Expm::Grid(generator_expm(p, self.t, MAX_EXPM_STATES)?),
            Model::Urn(u) => Expm::Grid(generator_expm(u, self.t, MAX_EXPM_STATES)?),
        })
    }
}

enum Expm {
    Line(ExpmMatrix<usize>),
    Grid(ExpmMatrix<Composition>),
}

impl Expm {
    /// `(p_xy, mass lost from row x)`.
    fn get(&self, x: &[usize], y: &[usize]) -> (f64, f64) {
        match self {
            Expm::Line(m) => {
                let lost = m.index_of(&x[0]).map_or(1.0, |i| m.lost_mass()[i].abs());
                (m.get(&x[0], &y[0]), lost)
            }
            Expm::Grid(m) => {
                let (cx, cy) = (Composition::new(x.to_vec()), Composition::new(y.to_vec()));
                let lost = m.index_of(&cx).map_or(1.0, |i| m.lost_mass()[i].abs());
                (m.get(&cx, &cy), lost)
            }
        }
    }
}

fn entry(x: &[usize], y: &[usize], p: f64, estimate: f64, flagged: bool) -> Entry {
    Entry {
        x: x.to_vec(),
        y: y.to_vec(),
        p,
        estimate,
        flagged,
    }
}

fn ctx<'a>(model: &'a Model, c: &Common, g: &Global, form: Form) -> CliResult<Ctx<'a>> {
    Ok(Ctx {
        model,
        t: literal::time(&c.t)?,
        tol: g.tol.unwrap_or(DEFAULT_TOL),
        form: match form {
            Form::Stationary => EigenForm::Stationary,
            Form::General => EigenForm::General,
        },
    })
}

pub fn transition(a: &TransitionArgs, g: &Global) -> CliResult<(Output, Status)> {
    if a.method == Method::Empirical {
        return Err(CliError::input("use simulate or compare for empirical frequencies"));
    }
    let model = load(&a.common.spec, g.float)?;
    let cx = ctx(&model, &a.common, g, a.form)?;
    let entries = cx.compute(a.method, &cx.pairs(&a.common)?)?;
    let status = if entries.iter().any(|e| e.flagged) { Status::Numeric } else { Status::Ok };
    let method = a.method.name().to_string();
    let t = json!(cx.t);
    let out = if let Model::Process(..) = model {
        let recs: Vec<TransitionRecord> = entries
            .iter()
            .map(|e| TransitionRecord {
                i: e.x[0],
                j: e.y[0],
                t: t.clone(),
                p: json!(e.p),
                method: method.clone(),
                truncation_error_estimate: e.estimate,
                flagged: e.flagged,
            })
            .collect();
        let rows = recs
            .iter()
            .map(|r| {
                vec![
                    r.i.to_string(),
                    r.j.to_string(),
                    num(cx.t),
                    r.p.to_string(),
                    r.method.clone(),
                    num(r.truncation_error_estimate),
                    r.flagged.to_string(),
                ]
            })
            .collect();
        let header = ["i", "j", "t", "p", "method", "truncation_error_estimate", "flagged"];
        Output::new(&recs, &header, rows)
    } else {
        let recs: Vec<CompositionTransitionRecord> = entries
            .iter()
            .map(|e| CompositionTransitionRecord {
                x: e.x.clone(),
                y: e.y.clone(),
                t: t.clone(),
                p: json!(e.p),
                method: method.clone(),
                truncation_error_estimate: e.estimate,
                flagged: e.flagged,
            })
            .collect();
        let rows = recs
            .iter()
            .map(|r| {
                vec![
                    joined(&r.x),
                    joined(&r.y),
                    num(cx.t),
                    r.p.to_string(),
                    r.method.clone(),
                    num(r.truncation_error_estimate),
                    r.flagged.to_string(),
                ]
            })
            .collect();
        let header = ["x", "y", "t", "p", "method", "truncation_error_estimate", "flagged"];
        Output::new(&recs, &header, rows)
    };
    Ok((out, status))
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Composition or urn spec file.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub t: String,
    /// Initial composition `x0,x1,...`.
    #[arg(long)]
    pub x0: String,
    #[arg(long, default_value_t = 20240)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub replicates: usize,
}

/// Spectral predictions for every state reachable from `x`; `None` when
/// the spectral form is unavailable.
fn predictions(model: &Model, x: &Composition, t: f64, tol: f64) -> Option<Vec<(Composition, f64)>> {
    let states = match model {
        Model::Composition(p, _) => p.states(),
        Model::Urn(u) => u.states(),
        Model::Process(..) => return None,
    };
    states
        .into_iter()
        .map(|y| {
            let p = match model {
                Model::Composition(proc, _) => {
                    composition_transition(x, &y, &t, proc, EigenForm::Stationary, tol).ok()?.p
                }
                Model::Urn(u) => ehrenfest_dtype(x, &y, &t, u).ok()?,
                Model::Process(..) => unreachable!(),
            };
            Some((y, p))
        })
        .collect()
}

fn run_sim<P: JumpProcess>(proc: &P, config: &SimConfig) -> CliResult<krawtchouk::sim::EmpiricalDistribution> {
    Ok(empirical_transition(&simulate_path(proc, config)?)?)
}

fn simulate_model(model: &Model, config: &SimConfig) -> CliResult<krawtchouk::sim::EmpiricalDistribution> {
    match model {
        Model::Composition(p, _) => run_sim(p, config),
        Model::Urn(u) => run_sim(u, config),
        Model::Process(..) => Err(CliError::input("simulation needs a composition or urn spec")),
    }
}

pub fn simulate(a: &SimulateArgs, g: &Global) -> CliResult<(Output, Status)> {
    let model = load(&a.spec, g.float)?;
    let t = literal::time(&a.t)?;
    let mut x0 = Composition::new(literal::counts(&a.x0, "x0")?);
    if let Model::Composition(p, _) = &model {
        x0 = p.normalize(&x0)?;
    }
    let config = SimConfig::new(a.seed, a.replicates, t, x0.clone())?;
    let dist = simulate_model(&model, &config)?;
    let expected = predictions(&model, &x0, t, g.tol.unwrap_or(DEFAULT_TOL));
    let report = dist.report(&config, expected.as_deref());
    let rows = report
        .frequencies
        .iter()
        .map(|(s, (c, f, se))| vec![s.clone(), c.to_string(), num(*f), num(*se)])
        .collect();
    Ok((Output::new(&report, &["state", "count", "frequency", "standard_error"], rows), Status::Ok))
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    /// Methods, comma separated; the first deterministic one is the
    /// reference for `empirical`.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "spectral,expm")]
    pub methods: Vec<Method>,
    #[arg(long, value_enum, default_value_t = Form::Stationary)]
    pub form: Form,
    #[arg(long, default_value_t = 20240)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub replicates: usize,
}

pub fn compare(a: &CompareArgs, g: &Global) -> CliResult<(Output, Status)> {
    let model = load(&a.common.spec, g.float)?;
    let mut cx = ctx(&model, &a.common, g, a.form)?;
    let bound = g.tol.unwrap_or(COMPARE_TOL);
    // Truncation targets stay tight; the override is the comparison bound.
    cx.tol = DEFAULT_TOL.min(bound);
    let pairs = cx.pairs(&a.common)?;
    let deterministic: Vec<Method> = a.methods.iter().copied().filter(|m| *m != Method::Empirical).collect();
    if deterministic.is_empty() {
        return Err(CliError::input("compare needs at least one deterministic method"));
    }
    let columns = deterministic
        .iter()
        .map(|&m| cx.compute(m, &pairs))
        .collect::<CliResult<Vec<_>>>()?;
    let flagged = columns.iter().flatten().any(|e| e.flagged);
    let empirical = if a.methods.contains(&Method::Empirical) {
        Some(empirical_column(&model, &pairs, cx.t, a)?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(pairs.len());
    for (k, (x, y)) in pairs.iter().enumerate() {
        let vals: Vec<f64> = columns.iter().map(|c| c[k].p).collect();
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let mut values: BTreeMap<String, f64> =
            deterministic.iter().zip(&vals).map(|(m, v)| (m.name().to_string(), *v)).collect();
        let z = empirical.as_ref().map(|e| {
            let f = e[k];
            values.insert("empirical".into(), f);
            z_score(f, vals[0], a.replicates)
        });
        rows.push(CompareRow {
            x: x.clone(),
            y: y.clone(),
            values,
            max_abs_diff: hi - lo,
            z,
        });
    }
    let max_abs_diff = rows.iter().map(|r| r.max_abs_diff).fold(0.0, f64::max);
    let max_z = empirical.as_ref().map(|_| rows.iter().filter_map(|r| r.z).map(f64::abs).fold(0.0, f64::max));
    let passed = max_abs_diff <= bound && max_z.is_none_or(|z| z <= 4.0);
    let names: Vec<String> = a.methods.iter().map(|m| m.name().to_string()).collect();
    let mut header: Vec<&str> = vec!["x", "y"];
    header.extend(names.iter().map(String::as_str));
    header.push("max_abs_diff");
    if max_z.is_some() {
        header.push("z");
    }
    let csv_rows = rows
        .iter()
        .map(|r| {
            let mut row = vec![joined(&r.x), joined(&r.y)];
            row.extend(names.iter().map(|n| num(r.values[n])));
            row.push(num(r.max_abs_diff));
            if let Some(z) = r.z {
                row.push(num(z));
            }
            row
        })
        .collect();
    let report = CompareReport {
        t: cx.t,
        methods: names.clone(),
        rows,
        max_abs_diff,
        tol: bound,
        max_z,
        passed,
    };
    let status = if flagged {
        Status::Numeric
    } else if passed {
        Status::Ok
    } else {
        Status::Failed
    };
    Ok((Output::new(&report, &header, csv_rows), status))
}

/// `(f - p) / sqrt(p (1 - p) / R)`, with sigma from the prediction.
fn z_score(f: f64, p: f64, replicates: usize) -> f64 {
    let sigma = (p * (1.0 - p) / replicates as f64).sqrt();
    if sigma > 0.0 {
        (f - p) / sigma
    } else if (f - p).abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn empirical_column(model: &Model, pairs: &[(Vec<usize>, Vec<usize>)], t: f64, a: &CompareArgs) -> CliResult<Vec<f64>> {
    if let Model::Process(..) = model {
        return Err(CliError::input("empirical comparison needs a composition or urn spec"));
    }
    let mut cache: BTreeMap<Vec<usize>, krawtchouk::sim::EmpiricalDistribution> = BTreeMap::new();
    let mut out = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        if !cache.contains_key(x) {
            let config = SimConfig::new(a.seed, a.replicates, t, Composition::new(x.clone()))?;
            let dist = simulate_model(model, &config)?;
            let frac = dist.overflow() as f64 / dist.replicates() as f64;
            if frac >= MAX_OVERFLOW {
                return Err(CliError::numeric(format!(
                    "{} of {} paths from {x:?} left the truncated state space",
                    dist.overflow(),
                    dist.replicates()
                )));
            }
            cache.insert(x.clone(), dist);
        }
        out.push(cache[x].frequency(&Composition::new(y.clone())));
    }
    Ok(out)
}
