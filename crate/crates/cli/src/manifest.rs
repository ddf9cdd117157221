//! Run manifests: config echo, timing, status and hashed outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io_err, CliError, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: BTreeMap<String, String>,
    pub code_version: String,
    /// Seconds since the Unix epoch.
    pub start_time: f64,
    pub end_time: f64,
    pub status: String,
    pub files: Vec<FileRecord>,
    pub summary: serde_json::Value,
}

impl RunManifest {
    pub fn is_completed(&self) -> bool {
        self.status == "completed"
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").map_err(io_err(&path))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Re-hashes every listed file under `dir`; returns the mismatching paths.
    pub fn verify_hashes(&self, dir: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for rec in &self.files {
            if hash_file(&dir.join(&rec.path))? != rec.sha256 {
                bad.push(rec.path.clone());
            }
        }
        Ok(bad)
    }
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> Result<String> {
    Ok(hash_bytes(&std::fs::read(path).map_err(io_err(path))?))
}

/// Hashes `files` (absolute or relative to the cwd) and records them relative
/// to `dir`.
pub fn records(dir: &Path, files: &[PathBuf]) -> Result<Vec<FileRecord>> {
    let mut out = Vec::with_capacity(files.len());
    for f in files {
        let bytes = std::fs::read(f).map_err(io_err(f))?;
        let rel = f
            .strip_prefix(dir)
            .map_err(|_| CliError::Manifest(format!("{} is outside {}", f.display(), dir.display())))?;
        out.push(FileRecord {
            path: rel.to_string_lossy().replace('\\', "/"),
            sha256: hash_bytes(&bytes),
            bytes: bytes.len() as u64,
        });
    }
    out.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(out)
}
