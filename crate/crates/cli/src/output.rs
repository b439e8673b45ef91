//! Data files and run manifests.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::scenario::Format;

/// Column-oriented data with unit-bearing column names.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Default)]
pub struct Report {
    pub summary: Map<String, Value>,
    pub table: Option<Table>,
    /// Additional CSV tables written next to the main output, keyed by a
    /// file-name suffix such as `peaks`.
    pub side_tables: Vec<(String, Table)>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn put(&mut self, key: &str, value: impl serde::Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.summary.insert(key.to_string(), v);
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("cannot write {}: {e}", path.display()))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn write_csv(path: &Path, table: &Table) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(&table.columns).map_err(|e| io_err(path, e))?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell)).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn summary_table(summary: &Map<String, Value>) -> Table {
    let mut t = Table::new(["key", "value"]);
    for (k, v) in summary {
        t.push(vec![Value::String(k.clone()), Value::String(cell(v))]);
    }
    t
}

/// `dir/stem.suffix.csv` for a main output `dir/stem.ext`.
pub fn side_path(main: &Path, suffix: &str) -> PathBuf {
    let stem = main.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    main.with_file_name(format!("{stem}.{suffix}.csv"))
}

pub fn manifest_path(main: &Path) -> PathBuf {
    let name = main.file_name().and_then(|s| s.to_str()).unwrap_or("output");
    main.with_file_name(format!("{name}.manifest.json"))
}

/// Writes the main file and side tables; returns every path written.
pub fn write_report(report: &Report, format: Format, path: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = vec![path.to_path_buf()];
    match format {
        Format::Csv => match &report.table {
            Some(t) => write_csv(path, t)?,
            None => write_csv(path, &summary_table(&report.summary))?,
        },
        Format::Json => {
            let mut doc = report.summary.clone();
            if let Some(t) = &report.table {
                doc.insert("table".into(), t.to_json());
            }
            if !report.warnings.is_empty() {
                doc.insert("warnings".into(), json!(report.warnings));
            }
            let text = serde_json::to_string_pretty(&Value::Object(doc)).map_err(|e| io_err(path, e))?;
            std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))?;
        }
    }
    for (suffix, t) in &report.side_tables {
        let p = side_path(path, suffix);
        write_csv(&p, t)?;
        written.push(p);
    }
    Ok(written)
}

pub struct ManifestInfo<'a> {
    pub command: &'a str,
    pub inputs: Value,
    pub outputs: &'a [PathBuf],
    pub warnings: &'a [String],
    pub started_unix: f64,
    pub wall_seconds: f64,
    pub threads: usize,
}

pub fn write_manifest(path: &Path, info: &ManifestInfo) -> Result<(), CliError> {
    let doc = json!({
        "command": info.command,
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": info.inputs,
        "outputs": info.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "warnings": info.warnings,
        "threads": info.threads,
        "started_unix": info.started_unix,
        "wall_seconds": info.wall_seconds,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| io_err(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// Floats as JSON numbers; non-finite values become null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}
