//! Finite binary strings, the universal currency between machine outputs,
//! ingested data and tuple statistics.

use std::fmt;

use crate::error::{Error, Result};

/// A finite sequence of binary symbols, stored one symbol per byte (0 or 1).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn with_capacity(cap: usize) -> Self {
        BitString(Vec::with_capacity(cap))
    }

    /// Takes ownership of a 0/1 vector.
    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BitString(bits)
    }

    /// Parses a string of '0' and '1' characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::MalformedDistribution(format!(
                    "invalid bit character {other:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitString)
    }

    /// Unpacks bytes most-significant-bit first.
    pub fn from_bytes_msb(bytes: &[u8]) -> Self {
        let mut bits = Vec::with_capacity(bytes.len() * 8);
        for &byte in bytes {
            for shift in (0..8).rev() {
                bits.push((byte >> shift) & 1);
            }
        }
        BitString(bits)
    }

    /// Packs back into bytes MSB first; the final byte is zero-padded.
    pub fn to_bytes_msb(&self) -> Vec<u8> {
        let mut bytes = vec![0u8; self.0.len().div_ceil(8)];
        for (i, &bit) in self.0.iter().enumerate() {
            bytes[i / 8] |= bit << (7 - i % 8);
        }
        bytes
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.0.push(bit);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, u8>> {
        self.0.iter().copied()
    }

    /// 0 <-> 1 swapped copy.
    pub fn complemented(&self) -> Self {
        BitString(self.0.iter().map(|&b| 1 - b).collect())
    }

    /// Reversed copy.
    pub fn reversed(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        BitString(v)
    }
}

impl From<Vec<u8>> for BitString {
    fn from(bits: Vec<u8>) -> Self {
        BitString::from_bits(bits)
    }
}

impl std::ops::Index<usize> for BitString {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}

impl FromIterator<u8> for BitString {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        BitString(iter.into_iter().collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}
