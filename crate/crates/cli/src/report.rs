//! Artifact rendering. Both formats open with the same metadata block; CSV
//! carries it as `#` comment lines ahead of the table.

use ffmzm::mzm::QUADRATIC_TOL;
use ffmzm::spectral::{FF_TOL, HERMITIAN_TOL, RANGE_TOL};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{CommandKind, Format, RunConfig};
use crate::CliResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl Cell {
    /// CSV text; floats carry 17 significant digits so they parse back exactly.
    pub fn to_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// A named physics expectation and whether it held.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_owned(),
            passed,
            detail: detail.into(),
        }
    }

    /// `value ≤ bound`, with both numbers in the detail.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value <= bound, format!("{value:e} <= {bound:e}"))
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: CommandKind,
    pub summary: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: CommandKind, summary: Value) -> Self {
        Self {
            command,
            summary,
            columns: Vec::new(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn with_table(mut self, columns: &[&str], rows: Vec<Vec<Cell>>) -> Self {
        self.columns = columns.iter().map(|c| (*c).to_owned()).collect();
        self.rows = rows;
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn metadata(config: &RunConfig) -> Value {
    json!({
        "tool": "ffmzm",
        "version": ffmzm::VERSION,
        "command": config.command.name(),
        "spec": config.spec,
        "lengths": config.lengths,
        "seed": config.seed,
        "assert": config.assert,
        "tolerances": {
            "degeneracy_tol": config.tolerances.degeneracy_tol,
            "null_tol": config.tolerances.null_tol,
            "ff_tol": FF_TOL,
            "range_tol": RANGE_TOL,
            "hermitian_tol": HERMITIAN_TOL,
            "quadratic_tol": QUADRATIC_TOL,
        },
    })
}

/// Top-level JSON layout; field order puts the metadata block first.
#[derive(Serialize)]
struct Document<'a> {
    metadata: &'a Value,
    result: &'a Value,
    table: Value,
    checks: &'a [Check],
}

pub fn render(report: &Report, config: &RunConfig) -> CliResult<String> {
    let meta = metadata(config);
    match config.format {
        Format::Json => {
            let doc = Document {
                metadata: &meta,
                result: &report.summary,
                table: json!({ "columns": report.columns, "rows": report.rows }),
                checks: &report.checks,
            };
            let mut text = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
            text.push('\n');
            Ok(text)
        }
        Format::Csv => render_csv(report, &meta),
    }
}

fn render_csv(report: &Report, meta: &Value) -> CliResult<String> {
    let mut out = String::new();
    out.push_str(&format!("# metadata: {meta}\n"));
    out.push_str(&format!("# checks: {}\n", json!(report.checks)));
    let (columns, rows) = if report.columns.is_empty() {
        let mut flat = Vec::new();
        flatten("", &report.summary, &mut flat);
        (
            vec!["key".to_owned(), "value".to_owned()],
            flat.into_iter().map(|(k, v)| vec![Cell::Text(k), v]).collect(),
        )
    } else {
        (report.columns.clone(), report.rows.clone())
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&columns)?;
    for row in &rows {
        w.write_record(row.iter().map(Cell::to_field))?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).expect("CSV fields are UTF-8"));
    Ok(out)
}

/// Dotted-path scalars of a JSON value, in document order.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, Cell)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_owned() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => flatten_map(prefix, map, out),
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        Value::Null => out.push((prefix.to_owned(), Cell::Empty)),
        Value::Bool(b) => out.push((prefix.to_owned(), Cell::Bool(*b))),
        Value::Number(n) => out.push((
            prefix.to_owned(),
            match n.as_i64() {
                Some(i) => Cell::Int(i),
                None => Cell::Float(n.as_f64().unwrap_or(f64::NAN)),
            },
        )),
        Value::String(s) => out.push((prefix.to_owned(), Cell::Text(s.clone()))),
    }
}

fn flatten_map(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, Cell)>) {
    for (k, v) in map {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        flatten(&path, v, out);
    }
}
