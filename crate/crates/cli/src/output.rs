//! Output envelope: CSV with a header row, or JSON with `metadata` and
//! `data`. Floats always carry 17 significant digits.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Command-specific metadata merged into the envelope.
    pub metadata: Map<String, Value>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
            metadata: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.metadata.insert(key.to_string(), value);
    }

    fn envelope_metadata(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), json!(self.command));
        for (k, v) in &self.metadata {
            m.insert(k.clone(), v.clone());
        }
        m.insert("columns".into(), json!(self.columns));
        Value::Object(m)
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(x) => format_float(*x),
                Cell::Text(s) => s.clone(),
                Cell::Bool(b) => b.to_string(),
            }))?;
        }
        w.into_inner().map_err(|e| io::Error::other(e.to_string()))
    }

    /// The data rows are written by hand so numbers keep their 17 digits;
    /// non-finite values become null.
    pub fn to_json(&self) -> io::Result<Vec<u8>> {
        let mut out = Vec::new();
        out.extend_from_slice(b"{\"metadata\":");
        serde_json::to_writer(&mut out, &self.envelope_metadata())?;
        out.extend_from_slice(b",\"data\":[");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(b',');
            }
            out.push(b'[');
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    out.push(b',');
                }
                match c {
                    Cell::Num(x) if x.is_finite() => out.extend_from_slice(format_float(*x).as_bytes()),
                    Cell::Num(_) => out.extend_from_slice(b"null"),
                    Cell::Text(s) => serde_json::to_writer(&mut out, s)?,
                    Cell::Bool(b) => out.extend_from_slice(if *b { b"true" } else { b"false" }),
                }
            }
            out.push(b']');
        }
        out.extend_from_slice(b"]}\n");
        Ok(out)
    }

    /// Writes the table to `out` (stdout when `None`). CSV metadata goes to
    /// `<out>.meta.json`, or to stderr when writing to stdout.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        let body = match format {
            Format::Csv => self.to_csv()?,
            Format::Json => self.to_json()?,
        };
        match out {
            Some(path) => {
                fs::write(path, &body)?;
                if format == Format::Csv {
                    let mut meta = serde_json::to_vec_pretty(&self.envelope_metadata())?;
                    meta.push(b'\n');
                    fs::write(sidecar(path), meta)?;
                }
            }
            None => {
                io::stdout().lock().write_all(&body)?;
                if format == Format::Csv {
                    let meta = serde_json::to_string(&self.envelope_metadata())?;
                    eprintln!("{meta}");
                }
            }
        }
        Ok(())
    }
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".meta.json");
    PathBuf::from(s)
}
