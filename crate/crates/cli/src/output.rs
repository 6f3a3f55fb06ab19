//! Atomic file output with a `.meta.json` sidecar per artifact.

use std::io::Write;
use std::path::{Path, PathBuf};

use cmc_core::discretization::GridMetadata;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub file: String,
    pub grid: Option<GridMetadata>,
}

pub struct Writer {
    dir: PathBuf,
    config_hash: String,
    grid: Option<GridMetadata>,
}

impl Writer {
    pub fn new(dir: &Path, config_hash: String) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_hash,
            grid: None,
        })
    }

    pub fn with_grid(mut self, grid: GridMetadata) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn meta(&self, file: &str) -> Meta {
        Meta {
            tool: "cmc-lab",
            version: env!("CARGO_PKG_VERSION"),
            config_hash: self.config_hash.clone(),
            file: file.to_string(),
            grid: self.grid.clone(),
        }
    }

    /// Writes `name` and `name.meta.json`.
    pub fn write(&self, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, contents)?;
        let meta = serde_json::to_vec_pretty(&self.meta(name)).expect("metadata serializes");
        write_atomic(&self.dir.join(format!("{name}.meta.json")), &meta)?;
        Ok(path)
    }

    /// Writes a JSON document as `{"meta": …, <value fields>}`.
    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut doc = serde_json::to_value(value).map_err(|e| CliError::Io(e.to_string()))?;
        if let serde_json::Value::Object(map) = &mut doc {
            let meta = serde_json::to_value(self.meta(name)).expect("metadata serializes");
            map.insert("meta".into(), meta);
        }
        let mut bytes = serde_json::to_vec_pretty(&doc).expect("json serializes");
        bytes.push(b'\n');
        self.write(name, &bytes)
    }
}

/// Write to a temporary file in the target directory, then rename over the
/// target.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
