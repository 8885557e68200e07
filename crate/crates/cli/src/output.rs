//! Column tables rendered as CSV or JSON.

use std::fmt::Write as _;

use pbe_core::analysis::format_float;
use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// `meta` becomes `#` header lines, `summary` trailing `#` lines.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, f64)>,
}

impl Table {
    pub fn new(meta: Vec<(String, String)>, columns: Vec<String>) -> Self {
        Self { meta, columns, ..Self::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        for (k, v) in &self.summary {
            let _ = writeln!(out, "# {k}={}", format_float(*v));
        }
        out
    }

    /// `{"meta": {...}, "columns": {"name": [...], ...}, ...summary}`.
    pub fn to_json(&self) -> String {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
        let columns: Map<String, Value> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), Value::Array(self.rows.iter().map(|r| r[i].json()).collect())))
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        doc.insert("columns".into(), Value::Object(columns));
        for (k, v) in &self.summary {
            doc.insert(k.clone(), Value::from(*v));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("table serializes");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Write to `path`, or standard output when absent.
pub fn emit(text: &str, path: Option<&str>) -> CliResult<()> {
    use std::io::Write;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {p}: {e}"))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}")))
        }
    }
}
