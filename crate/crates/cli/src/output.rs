//! CSV tables, JSON summaries and the run manifest.

use crate::error::CliError;
use crate::settings::Settings;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Output directory plus the list of files written so far.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
    started: Instant,
}

/// Provenance of one run. Kept out of the determinism guarantee.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub wall_time: f64,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&mut self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        std::fs::write(&path, text)?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// One `#` metadata line, the column names, then the rows.
    pub fn csv(&mut self, name: &str, meta: &str, table: &Table) -> Result<PathBuf, CliError> {
        let mut text = format!("# {meta}\n{}\n", table.columns.join(","));
        for row in &table.rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write(name, &text)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Solver(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Write `<command>_manifest.json` listing everything written before it.
    pub fn manifest(mut self, settings: &Settings) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            command: settings.command().to_string(),
            config_digest: settings.digest(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.written.iter().map(|p| p.display().to_string()).collect(),
            wall_time: self.started.elapsed().as_secs_f64(),
        };
        let name = format!("{}_manifest.json", settings.command().replace('-', "_"));
        self.json(&name, &manifest)
    }
}

/// Rows of preformatted cells.
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal, in exponent form when very small or large.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Empty cell for a missing value.
pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// JSON has no NaN or infinity.
pub fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}
