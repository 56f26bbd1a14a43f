//! k-tuple frequency distributions: extraction of overlapping windows,
//! exact integer aggregation, ranking, and the empirical probability /
//! complexity estimators derived from them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::experiment::SampleSpec;
use crate::real::Real;

/// A k-tuple packed into an integer, most significant bit first, so numeric
/// order equals lexicographic order of the binary strings.
pub type TupleCode = u32;

/// Hard memory guard on tuple length.
pub const MAX_K: u8 = 24;

pub(crate) fn check_k(k: u8) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidK { k, max: MAX_K });
    }
    Ok(())
}

/// "0101"-style label of a tuple code.
pub fn tuple_label(code: TupleCode, k: u8) -> String {
    (0..k)
        .map(|i| {
            if (code >> (k - 1 - i)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Parses a binary label into (code, k).
pub fn parse_tuple(label: &str) -> Result<(TupleCode, u8)> {
    let k = label.len();
    if k == 0 || k > MAX_K as usize {
        return Err(Error::InvalidK {
            k: k.min(255) as u8,
            max: MAX_K,
        });
    }
    let mut code: TupleCode = 0;
    for c in label.chars() {
        code = (code << 1)
            | match c {
                '0' => 0,
                '1' => 1,
                other => {
                    return Err(Error::MalformedDistribution(format!(
                        "invalid tuple character {other:?} in {label:?}"
                    )))
                }
            };
    }
    Ok((code, k as u8))
}

/// Bitwise complement within width k.
pub fn complement_code(code: TupleCode, k: u8) -> TupleCode {
    !code & ((1u32 << k) - 1)
}

/// Bit reversal within width k.
pub fn reverse_code(code: TupleCode, k: u8) -> TupleCode {
    let mut out = 0;
    for i in 0..k {
        out |= ((code >> i) & 1) << (k - 1 - i);
    }
    out
}

/// All overlapping k-windows of `bits` as a multiset of codes; empty when
/// the string is shorter than k.
pub fn extract_tuples(bits: &BitString, k: u8) -> Result<Vec<TupleCode>> {
    check_k(k)?;
    let n = bits.len();
    if n < k as usize {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(n - k as usize + 1);
    let mask = (1u32 << k) - 1;
    let mut code: u32 = 0;
    for (i, bit) in bits.iter().enumerate() {
        code = ((code << 1) | bit as u32) & mask;
        if i + 1 >= k as usize {
            out.push(code);
        }
    }
    Ok(out)
}

/// Streaming accumulator for tuple counts; dense for small k, sparse above.
#[derive(Clone, Debug)]
pub struct TupleAccumulator {
    k: u8,
    dense: Option<Vec<u64>>,
    sparse: BTreeMap<TupleCode, u64>,
}

impl TupleAccumulator {
    pub fn new(k: u8) -> Result<Self> {
        check_k(k)?;
        let dense = (k <= 16).then(|| vec![0u64; 1 << k]);
        Ok(TupleAccumulator {
            k,
            dense,
            sparse: BTreeMap::new(),
        })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    fn bump(&mut self, code: TupleCode, by: u64) {
        match &mut self.dense {
            Some(v) => v[code as usize] += by,
            None => *self.sparse.entry(code).or_insert(0) += by,
        }
    }

    /// Adds every overlapping k-window of `bits`.
    pub fn add_bits(&mut self, bits: &BitString) {
        let k = self.k as usize;
        if bits.len() < k {
            return;
        }
        let mask = (1u32 << self.k) - 1;
        let mut code: u32 = 0;
        for (i, bit) in bits.iter().enumerate() {
            code = ((code << 1) | bit as u32) & mask;
            if i + 1 >= k {
                self.bump(code, 1);
            }
        }
    }

    /// Adds non-overlapping k-blocks, dropping a trailing partial block.
    pub fn add_blocks(&mut self, bits: &BitString) {
        let k = self.k as usize;
        let slice = bits.bits();
        for chunk in slice.chunks_exact(k) {
            let code = chunk.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
            self.bump(code, 1);
        }
    }

    /// Commutative integer merge.
    pub fn merge(mut self, other: TupleAccumulator) -> TupleAccumulator {
        debug_assert_eq!(self.k, other.k);
        match (&mut self.dense, other.dense) {
            (Some(a), Some(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            _ => {
                for (code, c) in other.sparse {
                    self.bump(code, c);
                }
            }
        }
        self
    }

    pub fn finish(self, meta: DistMeta) -> TupleDistribution {
        let entries: Vec<(TupleCode, u64)> = match self.dense {
            Some(v) => v
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .map(|(code, c)| (code as TupleCode, c))
                .collect(),
            None => self.sparse.into_iter().collect(),
        };
        let total = entries.iter().map(|&(_, c)| c).sum();
        TupleDistribution {
            k: self.k,
            entries,
            total,
            meta,
        }
    }
}

/// Identifies the physical bytes a distribution was ingested from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceDescriptor {
    /// "file", "dna" or "image"; "merged" for multi-file aggregates.
    pub kind: String,
    pub path: String,
    /// Free-form parameters: encoding set, threshold, caps, window mode.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
    /// SHA-256 of the ingested bytes (hex).
    pub digest: String,
}

/// Provenance carried by a distribution and echoed in its serialized form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DistMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SampleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceDescriptor>,
}

impl DistMeta {
    pub fn labeled(class: &str) -> Self {
        DistMeta {
            class: Some(class.to_string()),
            ..DistMeta::default()
        }
    }
}

/// Exact integer counts of observed k-tuples; probabilities are derived on
/// demand and never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct TupleDistribution {
    k: u8,
    /// Sorted by code ascending; counts strictly positive.
    entries: Vec<(TupleCode, u64)>,
    total: u64,
    meta: DistMeta,
}

impl TupleDistribution {
    /// Counts every overlapping k-window of every input string.
    pub fn aggregate<'a, I>(outputs: I, k: u8, meta: DistMeta) -> Result<Self>
    where
        I: IntoIterator<Item = &'a BitString>,
    {
        let mut acc = TupleAccumulator::new(k)?;
        for bits in outputs {
            acc.add_bits(bits);
        }
        Ok(acc.finish(meta))
    }

    /// Builds from explicit counts (zero counts are dropped).
    pub fn from_counts<I>(k: u8, counts: I, meta: DistMeta) -> Result<Self>
    where
        I: IntoIterator<Item = (TupleCode, u64)>,
    {
        check_k(k)?;
        let mut map = BTreeMap::new();
        for (code, c) in counts {
            if code >= (1u32 << k) {
                return Err(Error::MalformedDistribution(format!(
                    "tuple code {code} out of range for k={k}"
                )));
            }
            if c > 0 {
                *map.entry(code).or_insert(0u64) += c;
            }
        }
        let entries: Vec<_> = map.into_iter().collect();
        let total = entries.iter().map(|&(_, c)| c).sum();
        Ok(TupleDistribution {
            k,
            entries,
            total,
            meta,
        })
    }

    /// The maximum-entropy reference: every tuple in {0,1}^k counted once.
    pub fn uniform(k: u8) -> Result<Self> {
        check_k(k)?;
        let entries: Vec<_> = (0..1u64 << k).map(|c| (c as TupleCode, 1u64)).collect();
        Ok(TupleDistribution {
            k,
            total: entries.len() as u64,
            entries,
            meta: DistMeta::labeled("uniform"),
        })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Observed (code, count) pairs, sorted by code.
    pub fn entries(&self) -> &[(TupleCode, u64)] {
        &self.entries
    }

    pub fn meta(&self) -> &DistMeta {
        &self.meta
    }

    pub fn set_meta(&mut self, meta: DistMeta) {
        self.meta = meta;
    }

    pub fn count(&self, code: TupleCode) -> u64 {
        match self.entries.binary_search_by_key(&code, |&(c, _)| c) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    /// count/total, `None` for tuples outside the support.
    pub fn probability<F: Real>(&self, code: TupleCode) -> Option<F> {
        if self.total == 0 {
            return None;
        }
        match self.count(code) {
            0 => None,
            c => Some(F::ratio(c, self.total)),
        }
    }

    /// The empirical output probability of a tuple. An absent tuple is
    /// reported as `Ok(None)`, distinct from a zero probability.
    pub fn estimate_m<F: Real>(&self, code: TupleCode) -> Result<Option<F>> {
        if self.total == 0 {
            return Err(Error::EmptyDistribution);
        }
        Ok(self.probability(code))
    }

    /// Complexity estimate in bits: -log2 of the empirical probability.
    /// Meaningful only relative to other tuples of the same distribution.
    pub fn estimate_k<F: Real>(&self, code: TupleCode) -> Result<Option<F>> {
        Ok(self.estimate_m::<F>(code)?.map(|m| -m.log2()))
    }

    /// Exact integer merge of two distributions over the same k.
    /// Metadata is taken from `self`.
    pub fn merge(&self, other: &TupleDistribution) -> Result<TupleDistribution> {
        if self.k != other.k {
            return Err(Error::MismatchedK {
                left: self.k,
                right: other.k,
            });
        }
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let a = self.entries.get(i);
            let b = other.entries.get(j);
            match (a, b) {
                (Some(&(ca, na)), Some(&(cb, nb))) => {
                    use std::cmp::Ordering::*;
                    match ca.cmp(&cb) {
                        Less => {
                            entries.push((ca, na));
                            i += 1;
                        }
                        Greater => {
                            entries.push((cb, nb));
                            j += 1;
                        }
                        Equal => {
                            entries.push((ca, na + nb));
                            i += 1;
                            j += 1;
                        }
                    }
                }
                (Some(&e), None) => {
                    entries.push(e);
                    i += 1;
                }
                (None, Some(&e)) => {
                    entries.push(e);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        let total = entries.iter().map(|&(_, c)| c).sum();
        Ok(TupleDistribution {
            k: self.k,
            entries,
            total,
            meta: self.meta.clone(),
        })
    }

    /// Ranked view: probability descending, ties in lexicographic tuple
    /// order.
    pub fn rank(&self) -> Result<RankedDistribution> {
        if self.total == 0 {
            return Err(Error::EmptyDistribution);
        }
        let mut entries = self.entries.clone();
        entries.sort_by(|&(ca, na), &(cb, nb)| nb.cmp(&na).then(ca.cmp(&cb)));
        Ok(RankedDistribution {
            k: self.k,
            total: self.total,
            entries,
        })
    }
}

/// Tuples sorted from most to least probable, ties broken lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedDistribution {
    k: u8,
    total: u64,
    entries: Vec<(TupleCode, u64)>,
}

impl RankedDistribution {
    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// (code, count) pairs in rank order.
    pub fn entries(&self) -> &[(TupleCode, u64)] {
        &self.entries
    }

    pub fn probability<F: Real>(&self, rank: usize) -> F {
        F::ratio(self.entries[rank].1, self.total)
    }

    /// (label, count, total) triples in rank order; exact fractions.
    pub fn fractions(&self) -> Vec<(String, u64, u64)> {
        self.entries
            .iter()
            .map(|&(code, c)| (tuple_label(code, self.k), c, self.total))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Serialization: a versioned JSON envelope plus a plain tuple,count CSV.
// ---------------------------------------------------------------------------

const FORMAT_NAME: &str = "algoprob.tuple-distribution";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    k: u8,
    total: u64,
    #[serde(default)]
    meta: DistMeta,
    counts: Vec<(String, u64)>,
}

impl TupleDistribution {
    /// Stable JSON envelope; identical distributions serialize to identical
    /// bytes.
    pub fn to_json(&self) -> String {
        let env = Envelope {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            k: self.k,
            total: self.total,
            meta: self.meta.clone(),
            counts: self
                .entries
                .iter()
                .map(|&(code, c)| (tuple_label(code, self.k), c))
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&env).expect("envelope serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let env: Envelope = serde_json::from_str(text)?;
        if env.format != FORMAT_NAME {
            return Err(Error::MalformedDistribution(format!(
                "unknown format {:?}",
                env.format
            )));
        }
        if env.version != FORMAT_VERSION {
            return Err(Error::MalformedDistribution(format!(
                "unsupported version {}",
                env.version
            )));
        }
        check_k(env.k)?;
        let mut entries = Vec::with_capacity(env.counts.len());
        for (label, count) in &env.counts {
            let (code, k) = parse_tuple(label)?;
            if k != env.k {
                return Err(Error::MalformedDistribution(format!(
                    "tuple {label:?} does not have length k={}",
                    env.k
                )));
            }
            if *count == 0 {
                return Err(Error::MalformedDistribution(format!(
                    "zero count for tuple {label:?}"
                )));
            }
            entries.push((code, *count));
        }
        entries.sort_by_key(|&(code, _)| code);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::MalformedDistribution("duplicate tuple".into()));
        }
        let total: u64 = entries.iter().map(|&(_, c)| c).sum();
        if total != env.total {
            return Err(Error::MalformedDistribution(format!(
                "declared total {} but counts sum to {}",
                env.total, total
            )));
        }
        Ok(TupleDistribution {
            k: env.k,
            entries,
            total,
            meta: env.meta,
        })
    }

    /// `tuple,count` rows in lexicographic tuple order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tuple,count\n");
        for &(code, c) in &self.entries {
            out.push_str(&tuple_label(code, self.k));
            out.push(',');
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("tuple,count") => {}
            _ => {
                return Err(Error::MalformedDistribution(
                    "missing tuple,count header".into(),
                ))
            }
        }
        let mut k: Option<u8> = None;
        let mut entries = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let (label, count) = line.split_once(',').ok_or_else(|| {
                Error::MalformedDistribution(format!("line {}: missing comma", lineno + 2))
            })?;
            let (code, this_k) = parse_tuple(label)?;
            match k {
                None => k = Some(this_k),
                Some(k0) if k0 != this_k => {
                    return Err(Error::MalformedDistribution(format!(
                        "line {}: tuple length {} != {}",
                        lineno + 2,
                        this_k,
                        k0
                    )))
                }
                _ => {}
            }
            let count: u64 = count.parse().map_err(|_| {
                Error::MalformedDistribution(format!("line {}: bad count {count:?}", lineno + 2))
            })?;
            if count == 0 {
                return Err(Error::MalformedDistribution(format!(
                    "line {}: zero count",
                    lineno + 2
                )));
            }
            entries.push((code, count));
        }
        let k = k.ok_or(Error::EmptyDistribution)?;
        entries.sort_by_key(|&(code, _)| code);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::MalformedDistribution("duplicate tuple".into()));
        }
        let total = entries.iter().map(|&(_, c)| c).sum();
        Ok(TupleDistribution {
            k,
            entries,
            total,
            meta: DistMeta::default(),
        })
    }
}
