//! Tabular results and their CSV / JSON exports.
//!
//! CSV layout: `#`-prefixed `key: value` metadata lines, one header row, then data rows.
//! Numbers carry 17 significant digits. Points that failed are kept out of the table
//! and written to a `<name>.errors.csv` sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::Result;

pub const TOOLKIT: &str = concat!("qbnet ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A point that produced no row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointError {
    pub index: usize,
    /// Values of the independent columns at the failed point.
    pub at: Vec<f64>,
    pub message: String,
}

/// Rows of equal length under named columns. The first `independent` columns are the
/// swept variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub name: String,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub independent: usize,
    pub rows: Vec<Vec<f64>>,
    pub errors: Vec<PointError>,
}

impl SweepTable {
    pub fn new(name: impl Into<String>, columns: Vec<String>, independent: usize) -> Self {
        Self {
            name: name.into(),
            metadata: Vec::new(),
            columns,
            independent,
            rows: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    /// Append a row, diverting it to the error list if any entry is not finite.
    pub fn push(&mut self, index: usize, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            let message = format!("non-finite value in column `{}`", self.columns[j]);
            self.fail(index, row[..self.independent].to_vec(), message);
        } else {
            self.rows.push(row);
        }
    }

    pub fn fail(&mut self, index: usize, at: Vec<f64>, message: String) {
        self.errors.push(PointError { index, at, message });
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn header_lines(&self, deterministic: bool) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "# toolkit: {TOOLKIT}");
        if !deterministic {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let _ = writeln!(s, "# generated: unix {secs}");
        }
        s
    }

    pub fn to_csv(&self, deterministic: bool) -> String {
        let mut s = self.header_lines(deterministic);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_number(*v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn errors_csv(&self) -> String {
        let mut s = String::from("index,");
        for c in &self.columns[..self.independent] {
            s.push_str(c);
            s.push(',');
        }
        s.push_str("message\n");
        for e in &self.errors {
            let _ = write!(s, "{},", e.index);
            for v in &e.at {
                let _ = write!(s, "{},", fmt_number(*v));
            }
            let _ = writeln!(s, "\"{}\"", e.message.replace('"', "'"));
        }
        s
    }

    pub fn to_json(&self, deterministic: bool) -> String {
        let view = JsonView {
            table: self,
            deterministic,
        };
        serde_json::to_string_pretty(&view).expect("table serializes")
    }

    /// Write `<dir>/<name>.<ext>` plus the error sidecar when any point failed.
    /// Returns the paths written.
    pub fn write(&self, dir: &Path, format: Format, deterministic: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let main = dir.join(format!("{}.{}", self.name, format.extension()));
        let body = match format {
            Format::Csv => self.to_csv(deterministic),
            Format::Json => self.to_json(deterministic),
        };
        fs::write(&main, body)?;
        let mut out = vec![main];
        let sidecar = dir.join(format!("{}.errors.csv", self.name));
        if self.errors.is_empty() {
            if sidecar.exists() {
                fs::remove_file(&sidecar)?;
            }
        } else {
            fs::write(&sidecar, self.errors_csv())?;
            out.push(sidecar);
        }
        Ok(out)
    }
}

/// 17 significant digits.
pub fn fmt_number(v: f64) -> String {
    format!("{v:.16e}")
}

struct JsonView<'a> {
    table: &'a SweepTable,
    deterministic: bool,
}

struct Columns<'a>(&'a SweepTable);

impl Serialize for Columns<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let t = self.0;
        let mut m = s.serialize_map(Some(t.columns.len()))?;
        for (j, c) in t.columns.iter().enumerate() {
            let col: Vec<f64> = t.rows.iter().map(|r| r[j]).collect();
            m.serialize_entry(c, &col)?;
        }
        m.end()
    }
}

struct Meta<'a>(&'a SweepTable, bool);

impl Serialize for Meta<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        for (k, v) in &self.0.metadata {
            m.serialize_entry(k, v)?;
        }
        m.serialize_entry("toolkit", TOOLKIT)?;
        if !self.1 {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            m.serialize_entry("generated", &format!("unix {secs}"))?;
        }
        m.end()
    }
}

impl Serialize for JsonView<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("name", &self.table.name)?;
        m.serialize_entry("metadata", &Meta(self.table, self.deterministic))?;
        m.serialize_entry("columns", &Columns(self.table))?;
        m.serialize_entry("errors", &self.table.errors)?;
        m.end()
    }
}
