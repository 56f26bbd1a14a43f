//! The ingestion manifest: one JSON line per sampled file, recording what
//! was ingested, skipped or rejected, plus the seeded directory sampler.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::{sample_without_replacement, Xoshiro256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// One manifest line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    /// SHA-256 hex of the ingested bytes; empty for skipped files.
    pub digest: String,
    pub size: u64,
    /// "ok", "skipped:size", "skipped:unreadable", "skipped:undecodable".
    pub status: String,
}

impl ManifestEntry {
    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("manifest entry serializes");
        s.push('\n');
        s
    }
}

/// Regular files under `dir` (recursive), sorted by path; with `sample`
/// set, a uniform seeded subset of that size.
pub fn list_files(dir: &Path, sample: Option<u64>, seed: u64) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    walk(dir, &mut files)?;
    files.sort();
    match sample {
        None => Ok(files),
        Some(m) => {
            if m >= files.len() as u64 {
                return Ok(files);
            }
            let mut rng = Xoshiro256::seeded(seed);
            let picks = sample_without_replacement(&mut rng, files.len() as u64, m);
            Ok(picks
                .into_iter()
                .map(|i| files[i as usize].clone())
                .collect())
        }
    }
}

fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let ty = entry.file_type().map_err(|e| Error::io(&path, e))?;
        if ty.is_dir() {
            walk(&path, out)?;
        } else if ty.is_file() {
            out.push(path);
        }
    }
    Ok(())
}
