use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{AppError, AppResult};
use crate::io::write_text;

/// Record of one command run, written after all of its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Every resolved option, enough to replay the run.
    pub args: Value,
    pub seeds: BTreeMap<String, u64>,
    pub files: Vec<String>,
    pub version: String,
    pub wall_time_seconds: f64,
    pub diagnostics: BTreeMap<String, Value>,
}

impl RunManifest {
    pub fn new(command: &str, args: &impl Serialize) -> AppResult<Self> {
        Ok(Self {
            command: command.to_string(),
            args: serde_json::to_value(args).map_err(|e| AppError::usage(e.to_string()))?,
            seeds: BTreeMap::new(),
            files: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: 0.0,
            diagnostics: BTreeMap::new(),
        })
    }

    pub fn file(&mut self, path: &Path) {
        self.files.push(path.display().to_string());
    }

    pub fn diag(&mut self, key: &str, value: impl Into<Value>) {
        self.diagnostics.insert(key.to_string(), value.into());
    }

    /// Writes the manifest as a single JSON line, listing itself last.
    pub fn write(mut self, path: &Path) -> AppResult<PathBuf> {
        self.file(path);
        let line = serde_json::to_string(&self).map_err(|e| AppError::io(path, e))?;
        write_text(path, &(line + "\n"))?;
        Ok(path.to_path_buf())
    }
}
