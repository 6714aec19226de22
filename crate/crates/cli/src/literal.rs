//! Argument literals. Probabilities and rates must be integers or `a/b`
//! rationals unless `--float` is given; times and tolerances accept any
//! number.

use krawtchouk::Scalar;
use serde_json::Value;

use crate::{CliError, CliResult};

fn is_decimal(s: &str) -> bool {
    s.parse::<f64>().is_ok() && s.parse::<i128>().is_err()
}

pub fn check(s: &str, float: bool, what: &str) -> CliResult<()> {
    if !float && is_decimal(s.trim()) {
        return Err(CliError::input(format!(
            "{what} = {s:?} is a decimal literal; write it as a/b or pass --float"
        )));
    }
    Ok(())
}

pub fn scalar<T: Scalar>(s: &str, float: bool, what: &str) -> CliResult<T> {
    check(s, float, what)?;
    T::parse(s).map_err(|e| CliError::input(format!("{what}: {e}")))
}

pub fn scalars<T: Scalar>(s: &str, float: bool, what: &str) -> CliResult<Vec<T>> {
    s.split(',').map(|v| scalar(v, float, what)).collect()
}

pub fn counts(s: &str, what: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| CliError::input(format!("{what}: {v:?} is not a non-negative integer")))
        })
        .collect()
}

/// A time: any non-negative finite number or `a/b`.
pub fn time(s: &str) -> CliResult<f64> {
    let t = f64::parse(s).map_err(|e| CliError::input(format!("t: {e}")))?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(CliError::input(format!("t = {s} must be finite and non-negative")));
    }
    Ok(t)
}

/// Rejects decimal probabilities and rates in a spec document; the
/// `truncation` blocks hold tolerances and are exempt.
pub fn check_spec(v: &Value, float: bool) -> CliResult<()> {
    if float {
        return Ok(());
    }
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => check(&n.to_string(), false, "spec value"),
        Value::String(s) => check(s, false, "spec value"),
        Value::Array(items) => items.iter().try_for_each(|x| check_spec(x, float)),
        Value::Object(map) => map
            .iter()
            .filter(|(k, _)| k.as_str() != "truncation")
            .try_for_each(|(_, x)| check_spec(x, float)),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use krawtchouk::Rational;
    use serde_json::json;

    #[test]
    fn decimals_need_float() {
        assert!(scalar::<Rational>("1/2", false, "p").is_ok());
        assert!(scalar::<Rational>("3", false, "p").is_ok());
        assert!(scalar::<Rational>("0.5", false, "p").is_err());
        assert!(scalar::<f64>("0.5", true, "p").is_ok());
        assert!(scalar::<Rational>("1e-3", false, "p").is_err());
        assert_eq!(time("1/2").unwrap(), 0.5);
        assert!(time("-1").is_err());
        assert!(scalar::<Rational>("inf", false, "p").is_err());
    }

    #[test]
    fn spec_walk_skips_truncation() {
        let ok = json!({"family": "ehrenfest", "params": {"N": 2, "p": "2/5"}, "truncation": {"tol": 1e-9}});
        assert!(check_spec(&ok, false).is_ok());
        let bad = json!({"family": "ehrenfest", "params": {"N": 2, "p": 0.4}});
        assert!(check_spec(&bad, false).is_err());
        assert!(check_spec(&bad, true).is_ok());
    }
}
