//! Rectangular numeric datasets and their on-disk form: CSV with a header
//! row (floats at 17 significant digits, so values round-trip exactly) plus
//! a JSON sidecar echoing the run configuration and seed.

use crate::config::RunConfig;
use crate::error::{Error, Result};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Dataset {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Argument(format!(
                "dataset {}: row of {} values against {} columns",
                self.name,
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// CSV text: header row, then rows with full-precision floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                out.push_str(&format_float(*v));
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits: enough to reproduce the exact binary double.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct Sidecar<'a> {
    dataset: &'a str,
    columns: &'a [String],
    rows: usize,
    seed: u64,
    version: &'a str,
    config: &'a RunConfig,
}

/// Write `<name>.csv` and `<name>.meta.json` under `dir`.
pub fn emit_dataset(ds: &Dataset, dir: &Path, config: &RunConfig, seed: u64) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let csv_path = dir.join(format!("{}.csv", ds.name));
    fs::write(&csv_path, ds.to_csv()).map_err(|e| Error::Io {
        path: csv_path.display().to_string(),
        source: e,
    })?;
    let sidecar = Sidecar {
        dataset: &ds.name,
        columns: &ds.columns,
        rows: ds.rows.len(),
        seed,
        version: env!("CARGO_PKG_VERSION"),
        config,
    };
    let meta_path = dir.join(format!("{}.meta.json", ds.name));
    let text = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| Error::Internal(format!("sidecar serialisation: {e}")))?;
    fs::write(&meta_path, text).map_err(|e| Error::Io {
        path: meta_path.display().to_string(),
        source: e,
    })?;
    Ok(csv_path)
}

/// Write a JSON report (already serialised) next to the datasets.
pub fn emit_report(name: &str, json: &str, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, json).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(path)
}
