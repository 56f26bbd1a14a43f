//! Static-prior block compressor: a canonical Huffman code over all 2^k
//! k-tuples, built once from a reference (machine-generated) distribution
//! and reused to encode arbitrary bit streams as non-overlapping k-blocks.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::distribution::{TupleCode, TupleDistribution};
use crate::error::{Error, Result};
use crate::real::Real;

/// Codebooks hold 2^k entries; keep that bounded.
pub const MAX_CODEBOOK_K: u8 = 16;

/// Payload layout: magic, version, k, original bit length (big-endian),
/// codebook digest, then the code stream padded to a byte boundary.
pub const PAYLOAD_MAGIC: [u8; 4] = *b"APCF";
pub const PAYLOAD_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 1 + 8 + 32;

/// A complete prefix-free code over all 2^k tuples.
///
/// Built by Huffman's algorithm on add-one-smoothed reference counts, then
/// assigned canonically (codewords ordered by length, ties by tuple), so a
/// given reference distribution always yields the same bits. The code is
/// fully determined by its length table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeBook {
    k: u8,
    lengths: Vec<u8>,
    codes: Vec<u128>,
    digest: [u8; 32],
    // Canonical decode tables, indexed by codeword length.
    first_code: Vec<u128>,
    count_at: Vec<u32>,
    start_at: Vec<u32>,
    canonical_symbols: Vec<TupleCode>,
}

impl CodeBook {
    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn lengths(&self) -> &[u8] {
        &self.lengths
    }

    pub fn digest(&self) -> &[u8; 32] {
        &self.digest
    }

    /// (codeword bits in the low end, length) for a tuple.
    pub fn codeword(&self, code: TupleCode) -> (u128, u8) {
        (self.codes[code as usize], self.lengths[code as usize])
    }

    /// Exact check that the Kraft sum equals one (a complete prefix code).
    pub fn kraft_is_complete(&self) -> bool {
        let max_len = *self.lengths.iter().max().expect("nonempty") as u32;
        let mut sum: u128 = 0;
        for &l in &self.lengths {
            sum += 1u128 << (max_len - l as u32);
        }
        sum == 1u128 << max_len
    }

    /// Rebuilds the canonical code from a length table.
    pub fn from_lengths(k: u8, lengths: Vec<u8>) -> Result<Self> {
        if k == 0 || k > MAX_CODEBOOK_K {
            return Err(Error::CodebookKTooLarge {
                k,
                max: MAX_CODEBOOK_K,
            });
        }
        if lengths.len() != 1 << k {
            return Err(Error::CorruptPayload(format!(
                "codebook has {} lengths, expected {}",
                lengths.len(),
                1 << k
            )));
        }
        if lengths.iter().any(|&l| l == 0 || l > 120) {
            return Err(Error::CorruptPayload("codeword length out of range".into()));
        }

        // Canonical order: by length, then by tuple code.
        let mut order: Vec<TupleCode> = (0..1u32 << k).collect();
        order.sort_by_key(|&c| (lengths[c as usize], c));

        let max_len = *lengths.iter().max().unwrap() as usize;
        let mut codes = vec![0u128; 1 << k];
        let mut first_code = vec![0u128; max_len + 1];
        let mut count_at = vec![0u32; max_len + 1];
        let mut start_at = vec![0u32; max_len + 1];

        let mut code: u128 = 0;
        let mut prev_len = lengths[order[0] as usize];
        for (pos, &sym) in order.iter().enumerate() {
            let len = lengths[sym as usize];
            if pos == 0 {
                code = 0;
            } else {
                code = (code + 1) << (len - prev_len);
            }
            if count_at[len as usize] == 0 {
                first_code[len as usize] = code;
                start_at[len as usize] = pos as u32;
            }
            count_at[len as usize] += 1;
            codes[sym as usize] = code;
            prev_len = len;
        }

        let book = CodeBook {
            k,
            digest: digest_for(k, &lengths),
            lengths,
            codes,
            first_code,
            count_at,
            start_at,
            canonical_symbols: order,
        };
        if !book.kraft_is_complete() {
            return Err(Error::CorruptPayload(
                "length table violates Kraft equality".into(),
            ));
        }
        Ok(book)
    }

    pub fn to_json(&self) -> String {
        let doc = CodebookDoc {
            format: "algoprob.codebook".into(),
            version: 1,
            k: self.k,
            digest: hex(&self.digest),
            lengths: self.lengths.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("codebook serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CodebookDoc = serde_json::from_str(text)?;
        if doc.format != "algoprob.codebook" || doc.version != 1 {
            return Err(Error::CorruptPayload("unknown codebook format".into()));
        }
        let book = Self::from_lengths(doc.k, doc.lengths)?;
        if hex(&book.digest) != doc.digest {
            return Err(Error::CodebookMismatch);
        }
        Ok(book)
    }
}

#[derive(Serialize, Deserialize)]
struct CodebookDoc {
    format: String,
    version: u32,
    k: u8,
    digest: String,
    lengths: Vec<u8>,
}

fn digest_for(k: u8, lengths: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"algoprob.codebook.v1");
    h.update([k]);
    h.update(lengths);
    h.finalize().into()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Builds the canonical Huffman codebook for a reference distribution.
///
/// Every tuple's weight is its reference count plus one, so unseen tuples
/// still get codewords and any input stays encodable. Ties inside the heap
/// are broken by node id (leaves in tuple order first, internal nodes in
/// creation order), making the length table deterministic.
pub fn build_codebook(reference: &TupleDistribution) -> Result<CodeBook> {
    let k = reference.k();
    if k > MAX_CODEBOOK_K {
        return Err(Error::CodebookKTooLarge {
            k,
            max: MAX_CODEBOOK_K,
        });
    }
    let n = 1usize << k;
    let mut weights: Vec<u128> = vec![1; n];
    for &(code, count) in reference.entries() {
        weights[code as usize] += count as u128;
    }

    // Huffman merge; children[i] exists for internal nodes only.
    let mut heap: BinaryHeap<Reverse<(u128, u32)>> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| Reverse((w, i as u32)))
        .collect();
    let mut children: Vec<(u32, u32)> = Vec::with_capacity(n - 1);
    let mut next_id = n as u32;
    while heap.len() > 1 {
        let Reverse((wa, a)) = heap.pop().unwrap();
        let Reverse((wb, b)) = heap.pop().unwrap();
        children.push((a, b));
        heap.push(Reverse((wa + wb, next_id)));
        next_id += 1;
    }

    // Depth of each leaf = codeword length.
    let mut lengths = vec![0u8; n];
    let root = next_id - 1;
    let mut stack = vec![(root, 0u8)];
    while let Some((node, depth)) = stack.pop() {
        if (node as usize) < n {
            lengths[node as usize] = depth.max(1);
        } else {
            let (a, b) = children[node as usize - n];
            stack.push((a, depth + 1));
            stack.push((b, depth + 1));
        }
    }

    CodeBook::from_lengths(k, lengths)
}

struct BitWriter {
    bytes: Vec<u8>,
    bit_pos: u8,
}

impl BitWriter {
    fn new(bytes: Vec<u8>) -> Self {
        BitWriter { bytes, bit_pos: 0 }
    }

    fn push_code(&mut self, code: u128, len: u8) {
        for i in (0..len).rev() {
            let bit = ((code >> i) & 1) as u8;
            if self.bit_pos == 0 {
                self.bytes.push(0);
            }
            let last = self.bytes.last_mut().unwrap();
            *last |= bit << (7 - self.bit_pos);
            self.bit_pos = (self.bit_pos + 1) % 8;
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn next_bit(&mut self) -> Option<u8> {
        let byte = self.bytes.get(self.pos / 8)?;
        let bit = (byte >> (7 - self.pos % 8)) & 1;
        self.pos += 1;
        Some(bit)
    }
}

fn blocks_of(bits: &BitString, k: u8) -> impl Iterator<Item = TupleCode> + '_ {
    let k = k as usize;
    bits.bits().chunks(k).map(move |chunk| {
        let mut code: u32 = chunk.iter().fold(0, |acc, &b| (acc << 1) | b as u32);
        code <<= k - chunk.len(); // zero-pad a trailing partial block
        code
    })
}

/// Encodes a bit stream as consecutive non-overlapping k-blocks (the final
/// partial block zero-padded), each replaced by its codeword.
pub fn encode(bits: &BitString, book: &CodeBook) -> Result<Vec<u8>> {
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(&PAYLOAD_MAGIC);
    header.push(PAYLOAD_VERSION);
    header.push(book.k());
    header.extend_from_slice(&(bits.len() as u64).to_be_bytes());
    header.extend_from_slice(book.digest());

    let mut w = BitWriter::new(header);
    for block in blocks_of(bits, book.k()) {
        let (code, len) = book.codeword(block);
        w.push_code(code, len);
    }
    Ok(w.bytes)
}

/// Inverse of [`encode`]; checks the header against the codebook and
/// reports desynchronization or trailing garbage as corruption.
pub fn decode(payload: &[u8], book: &CodeBook) -> Result<BitString> {
    if payload.len() < HEADER_LEN {
        return Err(Error::CorruptPayload("payload shorter than header".into()));
    }
    if payload[0..4] != PAYLOAD_MAGIC {
        return Err(Error::CorruptPayload("bad magic".into()));
    }
    if payload[4] != PAYLOAD_VERSION {
        return Err(Error::CorruptPayload(format!(
            "unsupported version {}",
            payload[4]
        )));
    }
    if payload[5] != book.k() || payload[14..46] != book.digest()[..] {
        return Err(Error::CodebookMismatch);
    }
    let bit_len = u64::from_be_bytes(payload[6..14].try_into().unwrap()) as usize;
    let k = book.k() as usize;
    let n_blocks = bit_len.div_ceil(k);

    let mut reader = BitReader {
        bytes: &payload[HEADER_LEN..],
        pos: 0,
    };
    let mut bits = BitString::with_capacity(n_blocks * k);
    for _ in 0..n_blocks {
        let sym = decode_symbol(book, &mut reader)?;
        for i in (0..k).rev() {
            bits.push(((sym >> i) & 1) as u8);
        }
    }

    // Only zero padding may remain, and less than one byte of it.
    let consumed = reader.pos;
    let available = (payload.len() - HEADER_LEN) * 8;
    if available - consumed >= 8 {
        return Err(Error::CorruptPayload(
            "trailing data after code stream".into(),
        ));
    }
    while let Some(bit) = reader.next_bit() {
        if bit != 0 {
            return Err(Error::CorruptPayload("nonzero padding".into()));
        }
    }

    // Bits beyond the recorded length are the encoder's block padding and
    // must be zero.
    for i in bit_len..bits.len() {
        if bits[i] != 0 {
            return Err(Error::CorruptPayload("nonzero block padding".into()));
        }
    }
    Ok(bits.iter().take(bit_len).collect())
}

fn decode_symbol(book: &CodeBook, reader: &mut BitReader<'_>) -> Result<TupleCode> {
    let mut acc: u128 = 0;
    let mut len = 0usize;
    loop {
        let bit = reader
            .next_bit()
            .ok_or_else(|| Error::CorruptPayload("truncated code stream".into()))?;
        acc = (acc << 1) | bit as u128;
        len += 1;
        if len >= book.first_code.len() {
            return Err(Error::CorruptPayload("codeword desynchronization".into()));
        }
        let count = book.count_at[len] as u128;
        if count > 0 {
            let first = book.first_code[len];
            if acc >= first && acc - first < count {
                let idx = book.start_at[len] as usize + (acc - first) as usize;
                return Ok(book.canonical_symbols[idx]);
            }
        }
    }
}

/// Size and entropy accounting for one encoded stream.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CompressionReport<F: Real> {
    pub input_bits: u64,
    /// Codeword bits only, excluding header and byte padding.
    pub code_bits: u64,
    pub payload_bytes: u64,
    pub blocks: u64,
    pub bits_per_block: F,
    /// Empirical entropy of the input's block distribution, in bits.
    pub block_entropy: F,
}

/// Measures how the codebook performs on a stream without materializing the
/// payload. For blocks drawn from the codebook's own distribution the
/// average codeword length lands within one bit above the block entropy.
pub fn compression_report<F: Real>(
    bits: &BitString,
    book: &CodeBook,
) -> Result<CompressionReport<F>> {
    let mut counts = vec![0u64; 1 << book.k()];
    let mut blocks = 0u64;
    let mut code_bits = 0u64;
    for block in blocks_of(bits, book.k()) {
        counts[block as usize] += 1;
        code_bits += book.lengths[block as usize] as u64;
        blocks += 1;
    }
    let mut entropy = F::zero();
    if blocks > 0 {
        for &c in counts.iter().filter(|&&c| c > 0) {
            let p = F::ratio(c, blocks);
            entropy = entropy - p * p.log2();
        }
    }
    Ok(CompressionReport {
        input_bits: bits.len() as u64,
        code_bits,
        payload_bytes: (HEADER_LEN as u64) + code_bits.div_ceil(8),
        blocks,
        bits_per_block: if blocks == 0 {
            F::zero()
        } else {
            F::ratio(code_bits, blocks)
        },
        block_entropy: entropy,
    })
}
