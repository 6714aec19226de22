use clap::{Args, ValueEnum};
use krawtchouk::mvk::{mvk_eval, Composition, MultiIndex};
use krawtchouk::polys::FamilyParams;
use krawtchouk::scalar::to_json_value;
use krawtchouk::{Rational, Scalar};
use serde_json::json;

use crate::basis::BasisSource;
use crate::output::{cell, Output};
use crate::records::EvalRecord;
use crate::{literal, CliError, CliResult, Global, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFamily {
    Krawtchouk,
    Meixner,
    #[value(alias = "poisson-charlier")]
    Charlier,
    Laguerre,
    DualHahn,
    /// Multivariate polynomial `Q_n(x; u)` over a basis.
    Mvk,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub family: EvalFamily,
    /// Degree; a comma list for one-dimensional families, the multi-index
    /// `n_1,...,n_{d-1}` for `mvk`.
    #[arg(long)]
    pub n: String,
    /// Argument; a comma list for one-dimensional families, the composition
    /// `x_0,...,x_{d-1}` for `mvk`.
    #[arg(long)]
    pub x: String,
    /// Krawtchouk trial count or dual Hahn `N`.
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    #[arg(long)]
    pub p: Option<String>,
    /// Meixner shape, or dual Hahn urn size `a`.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub nu: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[command(flatten)]
    pub basis: BasisSource,
}

fn need<'a, T>(v: &'a Option<T>, name: &str, family: &str) -> CliResult<&'a T> {
    v.as_ref()
        .ok_or_else(|| CliError::input(format!("--{name} is required for the {family} family")))
}

pub fn run(a: &EvalArgs, g: &Global) -> CliResult<(Output, Status)> {
    let records = if g.float { records::<f64>(a, g) } else { records::<Rational>(a, g) }?;
    let rows = records
        .iter()
        .map(|r| vec![r.family.clone(), cell(&r.n), cell(&r.x), cell(&r.value)])
        .collect();
    Ok((Output::new(&records, &["family", "n", "x", "value"], rows), Status::Ok))
}

fn records<T: Scalar>(a: &EvalArgs, g: &Global) -> CliResult<Vec<EvalRecord>> {
    let name = a.family.to_possible_value().expect("named").get_name().to_string();
    if a.family == EvalFamily::Mvk {
        let basis = a.basis.load::<T>(g.float)?;
        let x = Composition::new(literal::counts(&a.x, "x")?);
        let n = MultiIndex::new(literal::counts(&a.n, "n")?, x.total())?;
        let value = mvk_eval(&n, &x, &basis)?;
        return Ok(vec![EvalRecord {
            family: name,
            n: json!(n.as_slice()),
            x: json!(x.as_slice()),
            value: to_json_value(&value),
        }]);
    }
    let f = g.float;
    let params = match a.family {
        EvalFamily::Krawtchouk => FamilyParams::krawtchouk(
            *need(&a.big_n, "N", &name)?,
            literal::scalar(need(&a.p, "p", &name)?, f, "p")?,
        ),
        EvalFamily::Meixner => FamilyParams::meixner(
            literal::scalar(need(&a.a, "a", &name)?, f, "a")?,
            literal::scalar(need(&a.q, "q", &name)?, f, "q")?,
        ),
        EvalFamily::Charlier => FamilyParams::poisson_charlier(literal::scalar(need(&a.nu, "nu", &name)?, f, "nu")?),
        EvalFamily::Laguerre => FamilyParams::laguerre(literal::scalar(need(&a.beta, "beta", &name)?, f, "beta")?),
        EvalFamily::DualHahn => {
            let size = need(&a.a, "a", &name)?;
            let size = size
                .parse()
                .map_err(|_| CliError::input(format!("a = {size:?} must be a non-negative integer")))?;
            FamilyParams::dual_hahn(size, *need(&a.b, "b", &name)?, *need(&a.big_n, "N", &name)?)
        }
        EvalFamily::Mvk => unreachable!(),
    }?;
    let degrees = literal::counts(&a.n, "n")?;
    let xs: Vec<T> = literal::scalars(&a.x, f, "x")?;
    let mut out = Vec::with_capacity(degrees.len() * xs.len());
    for &n in &degrees {
        for x in &xs {
            out.push(EvalRecord {
                family: name.clone(),
                n: json!(n),
                x: to_json_value(x),
                value: to_json_value(&params.eval(n, x)?),
            });
        }
    }
    Ok(out)
}
