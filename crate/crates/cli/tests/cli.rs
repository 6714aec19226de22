use std::path::PathBuf;
use std::process::{Command, Output};

use krawtchouk::io::{CompositionTransitionRecord, TransitionRecord};
use krawtchouk_cli::records::{BasisOutput, CompareReport, ErrorRecord, EvalRecord, KernelRecord};
use serde_json::Value;

fn spec(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "specs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krawtchouk"))
        .args(args)
        .env_remove("KRAWTCHOUK_TOL")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json<T: serde::de::DeserializeOwned>(o: &Output) -> T {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// `a/b`, an integer string or a JSON number.
fn frac(v: &Value) -> f64 {
    match v {
        Value::String(s) => {
            let (a, b) = s.split_once('/').unwrap_or((s, "1"));
            a.parse::<f64>().unwrap() / b.parse::<f64>().unwrap()
        }
        v => v.as_f64().unwrap(),
    }
}

fn error(o: &Output) -> ErrorRecord {
    json(o)
}

#[test]
fn eval_krawtchouk_exact() {
    let o = run(&["eval", "--family", "krawtchouk", "--n", "2", "--x", "1", "--N", "2", "--p", "1/2"]);
    assert_eq!(code(&o), 0);
    let recs: Vec<EvalRecord> = json(&o);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].value, Value::from("-1/2"));
}

#[test]
fn eval_lists_and_float() {
    let o = run(&["eval", "--family", "charlier", "--n", "0,1", "--x", "0,1,2", "--nu", "2"]);
    assert_eq!(code(&o), 0);
    let recs: Vec<EvalRecord> = json(&o);
    assert_eq!(recs.len(), 6);
    let o = run(&["--float", "eval", "--family", "krawtchouk", "--n", "2", "--x", "1", "--N", "2", "--p", "0.5"]);
    assert_eq!(code(&o), 0);
    let recs: Vec<EvalRecord> = json(&o);
    assert_eq!(recs[0].value.as_f64(), Some(-0.5));
}

#[test]
fn decimals_need_float() {
    let o = run(&["eval", "--family", "krawtchouk", "--n", "2", "--x", "1", "--N", "2", "--p", "0.5"]);
    assert_eq!(code(&o), 2);
    let e = error(&o);
    assert_eq!(e.error.status, 2);
    assert!(e.error.message.contains("--float"), "{}", e.error.message);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--float"));
}

#[test]
fn bad_input_exits_two() {
    for args in [
        vec!["bogus"],
        vec!["eval", "--family", "krawtchouk", "--n", "2", "--x", "1", "--p", "1/2"],
        vec!["eval", "--family", "krawtchouk", "--n", "2", "--x", "1", "--N", "2", "--p", "3/2"],
        vec!["transition", "--spec", "/nonexistent.json", "--t", "1"],
        vec!["transition", "--spec", &spec("ehrenfest4.json"), "--t", "-1"],
        vec!["verify", "--suite", "nope"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert_eq!(error(&o).error.status, 2);
    }
}

#[test]
fn verify_mvk_orthogonality() {
    let o = run(&["verify", "--suite", "mvk-orthogonality", "--d", "3", "--N", "4"]);
    assert_eq!(code(&o), 0);
    let reports: Value = json(&o);
    let checks = reports[0]["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert_eq!(c["passed"], Value::Bool(true));
        assert_eq!(c["value"].as_f64(), Some(0.0));
    }
}

#[test]
fn compare_ehrenfest_methods_agree() {
    let o = run(&["compare", "--spec", &spec("ehrenfest2.json"), "--t", "0.5", "--methods", "spectral,expm"]);
    assert_eq!(code(&o), 0);
    let r: CompareReport = json(&o);
    assert!(r.passed);
    assert!(r.max_abs_diff < 1e-8);
    assert_eq!(r.rows.len(), 36);
    for x in r.rows.chunks(6) {
        let total: f64 = x.iter().map(|row| row.values["spectral"]).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn compare_with_empirical_column() {
    let o = run(&[
        "compare", "--spec", &spec("urn3.json"), "--t", "1/2", "--methods", "spectral,expm,empirical",
        "--replicates", "20000",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r: CompareReport = json(&o);
    assert!(r.max_z.unwrap() < 4.0);
    assert!(r.rows.iter().all(|row| row.values.contains_key("empirical")));
}

#[test]
fn transition_process_csv() {
    let o = run(&["--format", "csv", "transition", "--spec", &spec("mm-infinity.json"), "--t", "1", "--x", "1", "--y", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,j,t,p,method,truncation_error_estimate,flagged"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..2], &["1", "2"]);
    assert_eq!(row[2].parse::<f64>().unwrap(), 1.0);
    // M/M/inf with lambda = mu = 1: Poisson(1 - e^-t) plus one Bernoulli(e^-t) survivor.
    let q = (-1.0f64).exp();
    let m = 1.0 - q;
    let want = (-m).exp() * (q * m + (1.0 - q) * m * m / 2.0);
    let p: f64 = row[3].parse().unwrap();
    assert!((p - want).abs() < 1e-12, "{p} vs {want}");
    assert_eq!(row[4], "spectral");
    assert_eq!(row[6], "false");
}

#[test]
fn transition_records_round_trip() {
    let o = run(&["transition", "--spec", &spec("linear.json"), "--t", "1/2"]);
    assert_eq!(code(&o), 0);
    let recs: Vec<TransitionRecord> = json(&o);
    assert_eq!(recs.len(), 36);
    let again: Vec<TransitionRecord> = serde_json::from_str(&serde_json::to_string(&recs).unwrap()).unwrap();
    assert_eq!(again, recs);

    let o = run(&["transition", "--spec", &spec("ehrenfest2.json"), "--t", "1", "--x", "1,1,0", "--y", "0,0,2"]);
    assert_eq!(code(&o), 0);
    let recs: Vec<CompositionTransitionRecord> = json(&o);
    assert_eq!(recs[0].x, vec![1, 1, 0]);
    let exact = recs[0].p.as_f64().unwrap();
    for method in ["dual-spectral", "product-oracle", "expm"] {
        let o = run(&[
            "transition", "--spec", &spec("ehrenfest2.json"), "--t", "1", "--x", "1,1,0", "--y", "0,0,2", "--method",
            method,
        ]);
        assert_eq!(code(&o), 0, "{method}");
        let recs: Vec<CompositionTransitionRecord> = json(&o);
        assert!((recs[0].p.as_f64().unwrap() - exact).abs() < 1e-10, "{method}");
    }
}

#[test]
fn truncated_oracle_is_flagged() {
    // Two particles at the top retained level leak mass out of the
    // truncated generator.
    let top = "0,0,0,0,0,0,0,2";
    let o = run(&["transition", "--spec", &spec("mm-infinity-pair.json"), "--t", "1/2", "--x", top, "--y", top, "--method", "expm"]);
    assert_eq!(code(&o), 3);
    let recs: Vec<CompositionTransitionRecord> = json(&o);
    assert!(recs[0].flagged);
    assert!(recs[0].truncation_error_estimate > 1e-3);
}

#[test]
fn tolerance_from_environment() {
    // Rounding alone exceeds a 1e-30 target.
    let args = ["transition", "--spec", &spec("ehrenfest4.json"), "--t", "1", "--x", "0", "--y", "4"];
    let strict = Command::new(env!("CARGO_BIN_EXE_krawtchouk"))
        .args(args)
        .env("KRAWTCHOUK_TOL", "1e-30")
        .output()
        .unwrap();
    assert_eq!(code(&strict), 3);
    assert_eq!(code(&run(&args)), 0);
}

#[test]
fn simulate_is_reproducible() {
    let args = ["--format", "csv", "simulate", "--spec", &spec("ehrenfest2.json"), "--t", "1/2", "--x0", "0,0,2", "--replicates", "5000", "--seed", "3"];
    let a = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&run(&args)));
    let text = stdout(&a);
    assert!(text.starts_with("state,count,frequency,standard_error\n"));
    let total: u64 = text.lines().skip(1).map(|l| l.split(',').nth_back(2).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 5000);
}

#[test]
fn basis_output_feeds_back() {
    let o = run(&["basis", "--weights", "1/2,1/4,1/4"]);
    assert_eq!(code(&o), 0);
    let b: BasisOutput = json(&o);
    assert_eq!(b.d, 3);
    assert!(!b.orthonormal);
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("basis-feedback.json");
    std::fs::write(&path, serde_json::to_string(&b.record()).unwrap()).unwrap();
    let o = run(&["eval", "--family", "mvk", "--n", "1,0", "--x", "2,0,0", "--basis", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let recs: Vec<EvalRecord> = json(&o);
    // Degree one in the first function at x = (2, 0, 0) is 2 u_0^(1).
    assert!(recs[0].value.is_string());
    assert_eq!(frac(&recs[0].value), 2.0 * frac(&b.u[1][0]));

    let o = run(&["basis", "--weights", "1/2,1/4,1/4", "--orthonormal"]);
    assert_eq!(code(&o), 3);
    assert_eq!(error(&o).error.kind, "unsupported");
    let o = run(&["--float", "basis", "--weights", "1/2,1/4,1/4", "--orthonormal"]);
    assert_eq!(code(&o), 0);
    assert!(json::<BasisOutput>(&o).orthonormal);
}

#[test]
fn kernel_resums_to_delta() {
    let o = run(&["--format", "csv", "kernel", "--weights", "1/2,1/4,1/4", "--degree", "1", "--N", "2", "--x", "1,1,0", "--y", "0,0,2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "degree,x,y,value\n1,1 1 0,0 0 2,-2\n");

    let mut sums = std::collections::BTreeMap::<(Vec<usize>, Vec<usize>), f64>::new();
    for deg in ["0", "1", "2"] {
        let o = run(&["kernel", "--weights", "1/2,1/4,1/4", "--degree", deg, "--N", "2"]);
        assert_eq!(code(&o), 0);
        let recs: Vec<KernelRecord> = json(&o);
        assert_eq!(recs.len(), 36);
        for r in recs {
            *sums.entry((r.x, r.y)).or_default() += frac(&r.value);
        }
    }
    let p = [0.5f64, 0.25, 0.25];
    for ((x, y), k) in sums {
        let mass = 2.0 / y.iter().map(|&c| (1..=c).product::<usize>() as f64).product::<f64>()
            * y.iter().zip(p).map(|(&c, q)| q.powi(c as i32)).product::<f64>();
        let want = if x == y { 1.0 } else { 0.0 };
        assert!((k * mass - want).abs() < 1e-12, "{x:?} {y:?}");
    }
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    for verb in ["eval", "verify", "basis", "transition", "simulate", "compare", "kernel"] {
        assert!(stdout(&o).contains(verb));
    }
}

#[test]
fn mvk_csv_cells_are_space_joined() {
    let o = run(&["--format", "csv", "eval", "--family", "mvk", "--n", "1,0", "--x", "1,1,0", "--weights", "1/2,1/4,1/4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "family,n,x,value\nmvk,1 0,1 1 0,-1/2\n");
}
