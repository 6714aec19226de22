use clap::Args;
use krawtchouk::verify::{run_suite, Suite, SuiteReport, VerifyOptions};

use crate::output::{num, Output};
use crate::{CliError, CliResult, Global, Status};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Category count for suites with a `d` grid.
    #[arg(long)]
    pub d: Option<usize>,
    /// Trial or particle count for suites with an `N` grid.
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    #[arg(long, default_value_t = 20240)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub replicates: usize,
}

pub fn run(a: &VerifyArgs, g: &Global) -> CliResult<(Output, Status)> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        let s = Suite::from_name(&a.suite).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            CliError::input(format!("unknown suite {:?}; expected one of {}", a.suite, names.join(", ")))
        })?;
        vec![s]
    };
    let opts = VerifyOptions {
        d: a.d,
        n: a.big_n,
        seed: a.seed,
        replicates: a.replicates,
        float: g.float,
        tol: g.tol,
    };
    let reports = suites
        .into_iter()
        .map(|s| run_suite(s, &opts))
        .collect::<krawtchouk::Result<Vec<SuiteReport>>>()?;
    let mut rows = Vec::new();
    for r in &reports {
        for c in &r.checks {
            rows.push(vec![
                r.suite.clone(),
                c.property.clone(),
                c.passed.to_string(),
                num(c.value),
                num(c.bound),
                format!("{:?}", c.kind).to_lowercase(),
                c.cases.to_string(),
            ]);
        }
    }
    let status = if reports.iter().all(|r| r.passed) { Status::Ok } else { Status::Failed };
    let header = ["suite", "property", "passed", "value", "bound", "kind", "cases"];
    Ok((Output::new(&reports, &header, rows), status))
}
