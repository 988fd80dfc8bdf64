//! CSV and JSON writers.
//!
//! Floats are written with 17 significant digits. A non-finite value is a
//! numeric failure rather than a `NaN` or `inf` literal in the output.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{LabError, Result};

/// `x` in scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> Result<String> {
    if x.is_finite() {
        Ok(format!("{x:.16e}"))
    } else {
        Err(LabError::NonFinite(format!("refusing to write {x}")))
    }
}

/// JSON number for a finite `x`.
pub fn num(x: f64) -> Result<Value> {
    if x.is_finite() {
        Ok(Value::from(x))
    } else {
        Err(LabError::NonFinite(format!("refusing to write {x}")))
    }
}

pub fn nums(xs: &[f64]) -> Result<Value> {
    xs.iter().map(|&x| num(x)).collect::<Result<Vec<_>>>().map(Value::from)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
            .map_err(|e| LabError::io(format!("writing {}", path.display()), e))
    }

    /// Rows as JSON objects keyed by column name; numeric-looking cells
    /// become numbers.
    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.clone(), cell_value(v)))
                    .collect::<serde_json::Map<_, _>>();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

fn cell_value(cell: &str) -> Value {
    if cell.is_empty() {
        return Value::Null;
    }
    if let Ok(i) = cell.parse::<i64>() {
        return Value::from(i);
    }
    match cell.parse::<f64>() {
        Ok(f) if f.is_finite() => Value::from(f),
        _ => Value::from(cell),
    }
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| LabError::io(format!("writing {}", path.display()), e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| LabError::io(format!("writing {}", path.display()), e))
}

/// Collects the files a command writes, in order.
#[derive(Debug, Default)]
pub struct Outputs {
    dir: PathBuf,
    pub paths: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Self {
        Outputs {
            dir: dir.to_path_buf(),
            paths: Vec::new(),
        }
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<()> {
        let path = self.dir.join(name);
        table.write(&path)?;
        self.paths.push(path);
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<()> {
        let path = self.dir.join(name);
        write_json(&path, value)?;
        self.paths.push(path);
        Ok(())
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        write_text(&path, text)?;
        self.paths.push(path);
        Ok(())
    }
}
