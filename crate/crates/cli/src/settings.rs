//! Resolved run settings: defaults, then a key=value file, then flags.

use crate::error::CliError;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

/// Every setting that shapes the output files, keyed by its long flag name.
#[derive(Debug, Clone)]
pub struct Settings {
    command: &'static str,
    values: BTreeMap<&'static str, String>,
}

impl Settings {
    pub fn new(command: &'static str, defaults: &[(&'static str, &str)]) -> Self {
        let values = defaults.iter().map(|(k, v)| (*k, v.to_string())).collect();
        Self { command, values }
    }

    /// Overlay a flat `key = value` file. Blank lines and `#` comments are
    /// skipped; unknown keys are rejected.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{}:{}: expected key = value", path.display(), lineno + 1))
            })?;
            let key = key.trim().replace('_', "-");
            let slot = self
                .values
                .iter_mut()
                .find(|(k, _)| **k == key)
                .ok_or_else(|| CliError::Usage(format!("{}:{}: unknown key '{key}'", path.display(), lineno + 1)))?;
            *slot.1 = value.trim().to_string();
        }
        Ok(())
    }

    /// Overlay a flag when it was given.
    pub fn flag<T: ToString>(&mut self, key: &'static str, value: Option<T>) {
        if let Some(v) = value {
            self.values.insert(key, v.to_string());
        }
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|_| CliError::Usage(format!("bad value for {key}: '{raw}'")))
    }

    /// `None` for `auto` or `none`.
    pub fn optional<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            "auto" | "none" | "" => Ok(None),
            _ => self.get(key).map(Some),
        }
    }

    /// Comma-separated list; empty gives an empty vector.
    pub fn list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let raw = self.raw(key);
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad number '{s}' in {key}")))
            })
            .collect()
    }

    /// `a:b` pair.
    pub fn pair(&self, key: &str) -> Result<(f64, f64), CliError> {
        let raw = self.raw(key);
        let bad = || CliError::Usage(format!("{key} expects a:b, got '{raw}'"));
        let (a, b) = raw.split_once(':').ok_or_else(bad)?;
        Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
    }

    /// `command=... key=value ...` in key order.
    pub fn metadata(&self) -> String {
        let mut s = format!("command={}", self.command);
        for (k, v) in &self.values {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }

    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.metadata().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn command(&self) -> &'static str {
        self.command
    }
}
