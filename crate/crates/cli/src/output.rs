//! CSV table and JSON record file written at the end of every run.
//!
//! Files are written only after every grid point has been evaluated, so a
//! failed run leaves no partial output behind.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if !x.is_finite() {
        if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.headers).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

#[derive(Debug, Serialize)]
pub struct Document<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub schema_version: u32,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub axes: &'a [crate::sweep::Axis],
    pub records: &'a [T],
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`.
pub fn write<T: Serialize>(
    dir: &Path,
    stem: &str,
    table: &Table,
    doc: &Document<'_, T>,
) -> Result<[PathBuf; 2], CliError> {
    let csv = table.to_csv()?;
    let mut json = serde_json::to_vec_pretty(doc).map_err(|e| CliError::Io(e.to_string()))?;
    json.push(b'\n');
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    fs::write(&csv_path, csv)?;
    fs::write(&json_path, json)?;
    Ok([csv_path, json_path])
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn number_format() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1e-17), "1e-17");
        assert_eq!(num(2.5e20), "2.5e20");
        assert_eq!(num(0.0), "0");
    }
}
