use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::output::{sha256_file, Failure};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    /// `path` is recorded relative to `base` when it lies inside it.
    pub fn of(path: &Path, base: &Path) -> Result<Self, Failure> {
        let shown = path.strip_prefix(base).unwrap_or(path);
        Ok(Self { path: shown.display().to_string(), sha256: sha256_file(path)? })
    }
}

/// Written once at the end of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub format_version: String,
    /// Command line that reproduces the run.
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub rng_seed: u64,
    pub start_unix_ms: u128,
    pub end_unix_ms: u128,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest, Failure> {
    let p = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
}
