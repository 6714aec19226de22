use std::path::PathBuf;

use clap::Args;
use krawtchouk::mvk::{kernel_matrix, reproducing_kernel, Basis, BasisRecord, Composition};
use krawtchouk::scalar::to_json_value;
use krawtchouk::{Rational, Scalar};

use crate::output::{cell, joined, Output};
use crate::records::{BasisOutput, KernelRecord};
use crate::{literal, read_file, CliError, CliResult, Global, Status};

/// A basis from a JSON file `{d, p, u, a?}` or the Gram-Schmidt basis of
/// the indicator functions on `--p`.
#[derive(Debug, Clone, Args)]
pub struct BasisSource {
    #[arg(long, conflicts_with = "weights")]
    pub basis: Option<PathBuf>,
    /// Category probabilities, comma separated.
    #[arg(long = "weights", value_name = "P0,P1,...")]
    pub weights: Option<String>,
}

impl BasisSource {
    pub fn load<T: Scalar>(&self, float: bool) -> CliResult<Basis<T>> {
        if let Some(path) = &self.basis {
            let v: serde_json::Value = serde_json::from_str(&read_file(path)?)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            literal::check_spec(&v, float)?;
            let rec: BasisRecord =
                serde_json::from_value(v).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            return Ok(Basis::from_record(&rec)?);
        }
        if let Some(p) = &self.weights {
            return Ok(Basis::orthogonal_from(literal::scalars(p, float, "weights")?)?);
        }
        Err(CliError::input("a basis is required: pass --basis FILE or --weights P0,P1,..."))
    }

    pub fn given(&self) -> bool {
        self.basis.is_some() || self.weights.is_some()
    }
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[command(flatten)]
    pub source: BasisSource,
    /// Normalised Helmert contrasts on `d` uniform categories (float).
    #[arg(long, value_name = "D", conflicts_with_all = ["basis", "weights"])]
    pub helmert: Option<usize>,
    /// Rescale every function to unit norm.
    #[arg(long)]
    pub orthonormal: bool,
}

pub fn run(a: &BasisArgs, g: &Global) -> CliResult<(Output, Status)> {
    if let Some(d) = a.helmert {
        return Ok((emit(&Basis::helmert(d)?), Status::Ok));
    }
    let out = if g.float { build::<f64>(a, g) } else { build::<Rational>(a, g) }?;
    Ok((out, Status::Ok))
}

fn build<T: Scalar>(a: &BasisArgs, g: &Global) -> CliResult<Output> {
    let mut basis = a.source.load::<T>(g.float)?;
    if a.orthonormal {
        basis = basis.normalized()?;
    }
    Ok(emit(&basis))
}

fn emit<T: Scalar>(basis: &Basis<T>) -> Output {
    let rec = basis.to_record();
    let out = BasisOutput {
        d: rec.d,
        p: rec.p,
        u: rec.u,
        a: rec.a.unwrap_or_default(),
        orthonormal: basis.is_orthonormal(),
    };
    let mut rows = Vec::new();
    for l in 0..out.d {
        for j in 0..out.d {
            rows.push(vec![
                l.to_string(),
                j.to_string(),
                cell(&out.p[j]),
                cell(&out.u[l][j]),
                cell(&out.a[l]),
            ]);
        }
    }
    Output::new(&out, &["l", "j", "p", "u", "a"], rows)
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub source: BasisSource,
    #[arg(long)]
    pub degree: usize,
    /// Number of trials.
    #[arg(long = "N")]
    pub big_n: usize,
    /// First composition; with `--y`, a single value instead of the matrix.
    #[arg(long, requires = "y")]
    pub x: Option<String>,
    #[arg(long, requires = "x")]
    pub y: Option<String>,
}

pub fn kernel(a: &KernelArgs, g: &Global) -> CliResult<(Output, Status)> {
    let records = if g.float { kernel_records::<f64>(a, g) } else { kernel_records::<Rational>(a, g) }?;
    let rows = records
        .iter()
        .map(|r| vec![r.degree.to_string(), joined(&r.x), joined(&r.y), cell(&r.value)])
        .collect();
    Ok((Output::new(&records, &["degree", "x", "y", "value"], rows), Status::Ok))
}

fn kernel_records<T: Scalar>(a: &KernelArgs, g: &Global) -> CliResult<Vec<KernelRecord>> {
    let basis = a.source.load::<T>(g.float)?;
    let record = |x: &Composition, y: &Composition, v: &T| KernelRecord {
        degree: a.degree,
        x: x.as_slice().to_vec(),
        y: y.as_slice().to_vec(),
        value: to_json_value(v),
    };
    if let (Some(x), Some(y)) = (&a.x, &a.y) {
        let (x, y) = (Composition::new(literal::counts(x, "x")?), Composition::new(literal::counts(y, "y")?));
        if x.total() != a.big_n || y.total() != a.big_n {
            return Err(CliError::input(format!("x and y must sum to N = {}", a.big_n)));
        }
        let v = reproducing_kernel(a.degree, &x, &y, &basis)?;
        return Ok(vec![record(&x, &y, &v)]);
    }
    let states = Composition::all(a.big_n, basis.d());
    let m = kernel_matrix(a.degree, a.big_n, &basis)?;
    let mut out = Vec::with_capacity(states.len() * states.len());
    for (x, row) in states.iter().zip(&m) {
        for (y, v) in states.iter().zip(row) {
            out.push(record(x, y, v));
        }
    }
    Ok(out)
}
