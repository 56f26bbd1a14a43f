//! DNA sequences under the four single-bit letter encodings, applied
//! jointly so no particular encoding biases the distribution. The four
//! mappings pair into complements, which makes every joint distribution
//! exactly complement-symmetric.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::bits::BitString;
use crate::distribution::{DistMeta, SourceDescriptor, TupleAccumulator, TupleDistribution};
use crate::error::{Error, Result};
use crate::ingestion::files::{add_windows, WindowMode};
use crate::ingestion::manifest::sha256_hex;

/// bit assigned to G, T, C, A under encodings e1..e4.
const ENCODINGS: [[u8; 4]; 4] = [
    [1, 1, 0, 0], // e1: G,T -> 1; C,A -> 0
    [0, 1, 0, 1], // e2: G,C -> 0; T,A -> 1
    [1, 0, 1, 0], // e3: G,C -> 1; T,A -> 0
    [0, 0, 1, 1], // e4: G,T -> 0; C,A -> 1
];

fn base_index(c: char) -> Option<usize> {
    match c.to_ascii_uppercase() {
        'G' => Some(0),
        'T' => Some(1),
        'C' => Some(2),
        'A' => Some(3),
        _ => None,
    }
}

/// Splits a sequence at every non-ACGT character (case-insensitive);
/// windows never span a gap.
fn segments(sequence: &str) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for c in sequence.chars() {
        match base_index(c) {
            Some(i) => current.push(i),
            None => {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Applies all four encodings; one [`BitString`] per gap-free segment per
/// encoding.
pub fn encode_dna(sequence: &str) -> [Vec<BitString>; 4] {
    let segs = segments(sequence);
    std::array::from_fn(|e| {
        segs.iter()
            .map(|seg| seg.iter().map(|&b| ENCODINGS[e][b]).collect())
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FastaRecord {
    pub header: String,
    pub sequence: String,
}

/// Header lines begin '>'; sequence lines concatenate per record. Leading
/// sequence data without a header is accepted as an anonymous record.
pub fn parse_fasta(text: &str) -> Vec<FastaRecord> {
    let mut records: Vec<FastaRecord> = Vec::new();
    let mut open = false;
    for line in text.lines() {
        let line = line.trim_end();
        if let Some(header) = line.strip_prefix('>') {
            records.push(FastaRecord {
                header: header.to_string(),
                sequence: String::new(),
            });
            open = true;
        } else if !line.is_empty() {
            if !open {
                records.push(FastaRecord {
                    header: String::new(),
                    sequence: String::new(),
                });
                open = true;
            }
            records.last_mut().unwrap().sequence.push_str(line);
        }
    }
    records
}

/// Joint distribution of all four encodings over all records of a FASTA
/// text.
pub fn ingest_fasta_text(
    text: &str,
    k: u8,
    mode: WindowMode,
    origin: &Path,
) -> Result<TupleDistribution> {
    let records = parse_fasta(text);
    if records.is_empty() {
        return Err(Error::NoFastaRecords {
            path: origin.to_path_buf(),
        });
    }
    let mut acc = TupleAccumulator::new(k)?;
    for record in &records {
        for encoded in encode_dna(&record.sequence) {
            for segment in &encoded {
                add_windows(&mut acc, segment, mode);
            }
        }
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("encodings".into(), "e1,e2,e3,e4".into());
    parameters.insert("window".into(), mode.to_string());
    parameters.insert("records".into(), records.len().to_string());
    let mut dist = acc.finish(DistMeta::default());
    dist.set_meta(DistMeta {
        class: Some("DNA".into()),
        spec: None,
        seed: None,
        source: Some(SourceDescriptor {
            kind: "dna".into(),
            path: origin.display().to_string(),
            parameters,
            digest: sha256_hex(text.as_bytes()),
        }),
    });
    Ok(dist)
}

pub fn ingest_fasta(path: impl AsRef<Path>, k: u8, mode: WindowMode) -> Result<TupleDistribution> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ingest_fasta_text(&text, k, mode, path)
}
