//! CSV tables, the JSON run report, and atomic file writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;

/// Shortest decimal string that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row).expect("writing to memory");
        }
        w.into_inner().expect("flushing to memory")
    }
}

/// Outcome of one declared tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn range(name: &str, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let pass = value.is_finite() && lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        Check { name: name.to_string(), value, lower, upper, pass }
    }

    pub fn below(name: &str, value: f64, upper: f64) -> Self {
        Check::range(name, value, None, Some(upper))
    }

    pub fn above(name: &str, value: f64, lower: f64) -> Self {
        Check::range(name, value, Some(lower), None)
    }

    /// A yes/no property, recorded as 1 (holds) or 0.
    pub fn holds(name: &str, ok: bool) -> Self {
        Check::range(name, if ok { 1.0 } else { 0.0 }, Some(1.0), None)
    }
}

/// Constants the run used and where they came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    pub kappa12: f64,
    pub gamma31_hz: f64,
    pub calibrated: bool,
    pub iterations: Option<usize>,
    pub gain_residual: Option<f64>,
    pub advance_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: RunConfig,
    /// The same configuration as `key = value` text.
    pub config_text: String,
    pub constants: Option<Constants>,
    pub metrics: serde_json::Value,
    pub checks: Vec<Check>,
    pub all_checks_pass: bool,
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let fail = |e: std::io::Error| format!("{}: {e}", path.display());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Write `<command>.csv` and `<command>.json` into `out`.
pub fn write_outputs(out: &Path, command: &str, table: &Table, report: &RunReport) -> Result<(PathBuf, PathBuf), String> {
    std::fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    let csv_path = out.join(format!("{command}.csv"));
    let json_path = out.join(format!("{command}.json"));
    let mut json = serde_json::to_vec_pretty(report).map_err(|e| format!("serializing report: {e}"))?;
    json.push(b'\n');
    write_atomic(&csv_path, &table.to_csv())?;
    write_atomic(&json_path, &json)?;
    Ok((csv_path, json_path))
}
