//! Raw files as bit streams.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::distribution::{DistMeta, SourceDescriptor, TupleAccumulator, TupleDistribution};
use crate::error::{Error, Result};
use crate::ingestion::manifest::sha256_hex;

/// Files over 1 MiB are rejected, never truncated.
pub const DEFAULT_MAX_FILE_BYTES: u64 = 1 << 20;

/// How a bit stream is cut into k-tuples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowMode {
    /// Overlapping windows, matching the machine-output convention.
    #[default]
    Sliding,
    /// Non-overlapping k-blocks; a trailing partial block is dropped.
    Block,
}

impl std::fmt::Display for WindowMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WindowMode::Sliding => "sliding",
            WindowMode::Block => "block",
        })
    }
}

pub(crate) fn add_windows(acc: &mut TupleAccumulator, bits: &BitString, mode: WindowMode) {
    match mode {
        WindowMode::Sliding => acc.add_bits(bits),
        WindowMode::Block => acc.add_blocks(bits),
    }
}

/// Counts the k-windows of one byte buffer unpacked MSB first.
pub fn ingest_bytes(bytes: &[u8], k: u8, mode: WindowMode) -> Result<TupleDistribution> {
    let mut acc = TupleAccumulator::new(k)?;
    add_windows(&mut acc, &BitString::from_bytes_msb(bytes), mode);
    Ok(acc.finish(DistMeta::default()))
}

/// Ingests one file, rejecting anything over `max_bytes`. Windows never
/// cross file boundaries: merge per-file distributions to aggregate a
/// corpus.
pub fn ingest_file(
    path: impl AsRef<Path>,
    k: u8,
    mode: WindowMode,
    max_bytes: u64,
) -> Result<TupleDistribution> {
    let path = path.as_ref();
    let size = fs::metadata(path).map_err(|e| Error::io(path, e))?.len();
    if size > max_bytes {
        return Err(Error::OversizeFile {
            path: path.to_path_buf(),
            size,
            max: max_bytes,
        });
    }
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut dist = ingest_bytes(&bytes, k, mode)?;
    let mut parameters = BTreeMap::new();
    parameters.insert("window".into(), mode.to_string());
    parameters.insert("max_bytes".into(), max_bytes.to_string());
    dist.set_meta(DistMeta {
        class: Some("HD".into()),
        spec: None,
        seed: None,
        source: Some(SourceDescriptor {
            kind: "file".into(),
            path: path.display().to_string(),
            parameters,
            digest: sha256_hex(&bytes),
        }),
    });
    Ok(dist)
}
