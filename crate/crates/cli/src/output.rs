//! Tabular output in CSV or JSON, written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Config, Format};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

/// One output document: provenance, column names, rows, and trailing summary.
#[derive(Clone, Debug)]
pub struct Table {
    pub command: &'static str,
    /// Extra provenance beyond the resolved config (grid spec, target, ...).
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Value)>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            meta: Vec::new(),
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) {
        self.meta.push((key.to_string(), serde_json::to_value(value).expect("serializable meta")));
    }

    pub fn summary(&mut self, key: &str, value: impl Serialize) {
        self.summary
            .push((key.to_string(), serde_json::to_value(value).expect("serializable summary")));
    }

    fn check_finite(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            for (col, cell) in self.columns.iter().zip(row) {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        bail!("non-finite value {v} in column `{col}` of row {i}");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn render(&self, config: &Config, format: Format) -> Result<String> {
        self.check_finite()?;
        match format {
            Format::Csv => self.render_csv(config),
            Format::Json => self.render_json(config),
        }
    }

    fn render_csv(&self, config: &Config) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "# gamma-echo {}", self.command)?;
        let resolved = toml::to_string(config).context("serializing resolved config")?;
        for line in resolved.lines().filter(|l| !l.is_empty()) {
            writeln!(out, "# {line}")?;
        }
        for (key, value) in &self.meta {
            writeln!(out, "# {key} = {value}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        for (key, value) in &self.summary {
            writeln!(out, "# {key} = {value}")?;
        }
        Ok(out)
    }

    fn render_json(&self, config: &Config) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "command": self.command,
            "config": serde_json::to_value(config)?,
            "meta": Map::from_iter(self.meta.iter().cloned()),
            "columns": self.columns,
            "rows": rows,
            "summary": Map::from_iter(self.summary.iter().cloned()),
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        Ok(text)
    }
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// `out.csv` + "rho_D" → `out_rho_D.csv`.
pub fn suffixed_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}
