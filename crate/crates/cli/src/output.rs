use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::{CliError, CliResult, Format};

/// A verb's result: the JSON document and its CSV projection.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Output {
    pub fn new(json: &impl Serialize, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Self {
            json: serde_json::to_value(json).expect("records serialise"),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> CliResult<()> {
        let io = |e: std::io::Error| CliError::input(format!("writing output: {e}"));
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json).map_err(|e| io(e.into()))?;
                writeln!(out).map_err(io)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let csv_err = |e: csv::Error| CliError::input(format!("writing csv: {e}"));
                w.write_record(&self.header).map_err(csv_err)?;
                for r in &self.rows {
                    w.write_record(r).map_err(csv_err)?;
                }
                w.flush().map_err(io)
            }
        }
    }
}

/// JSON values in CSV cells: strings bare, numbers as written, arrays
/// space separated.
pub fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// `1 1 0` for a composition cell.
pub fn joined(x: &[usize]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Shortest round-trip form, with an exponent for very small or large
/// magnitudes.
pub fn num(x: f64) -> String {
    serde_json::Number::from_f64(x).map_or_else(|| x.to_string(), |n| n.to_string())
}
