//! 2-Tag systems: at each step the two leading symbols are deleted and the
//! production associated with that 2-symbol block is appended. Productions
//! are binary strings of length 0 through 3, so there are 15^4 = 50625
//! distinct rule sets.

use std::collections::VecDeque;
use std::fmt;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::machines::{InitialCondition, MachineClass, MachineOutput};

pub const TAG_DELETION_NUMBER: usize = 2;
pub const TAG_MAX_PRODUCTION_LEN: usize = 3;
/// 15^4: each of the four 2-symbol blocks maps to one of the 15 strings of
/// length 0..=3.
pub const TAG_CLASS_SIZE: u64 = 15 * 15 * 15 * 15;

/// The 15 production strings in length-then-lexicographic order.
fn production_by_digit(digit: u64) -> BitString {
    debug_assert!(digit < 15);
    if digit == 0 {
        return BitString::new();
    }
    // Strings of length L occupy digits [2^L - 1, 2^(L+1) - 1).
    let mut len = 1;
    while digit >= (1 << (len + 1)) - 1 {
        len += 1;
    }
    let value = digit - ((1 << len) - 1);
    (0..len)
        .map(|i| ((value >> (len - 1 - i)) & 1) as u8)
        .collect()
}

fn digit_of_production(bits: &BitString) -> u64 {
    let len = bits.len();
    debug_assert!(len <= TAG_MAX_PRODUCTION_LEN);
    let value: u64 = bits.iter().fold(0, |acc, b| acc << 1 | b as u64);
    ((1u64 << len) - 1) + value
}

/// A total mapping from the four 2-symbol blocks to productions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagRuleSet {
    /// Indexed by the block read as a 2-bit number (00, 01, 10, 11).
    productions: [BitString; 4],
}

impl TagRuleSet {
    pub fn new(productions: [BitString; 4]) -> Result<Self> {
        for p in &productions {
            if p.len() > TAG_MAX_PRODUCTION_LEN {
                return Err(Error::MalformedDistribution(format!(
                    "tag production {p} longer than {TAG_MAX_PRODUCTION_LEN}"
                )));
            }
        }
        Ok(TagRuleSet { productions })
    }

    /// Base-15 digits of `index`, least significant first, select the
    /// productions for blocks 00, 01, 10, 11 in that order.
    pub fn decode(index: u64) -> Result<Self> {
        if index >= TAG_CLASS_SIZE {
            return Err(Error::IndexOutOfRange {
                class: "TS",
                index,
                size: TAG_CLASS_SIZE,
            });
        }
        let mut rest = index;
        let productions = std::array::from_fn(|_| {
            let digit = rest % 15;
            rest /= 15;
            production_by_digit(digit)
        });
        Ok(TagRuleSet { productions })
    }

    /// Inverse of [`TagRuleSet::decode`].
    pub fn encode(&self) -> u64 {
        self.productions
            .iter()
            .rev()
            .fold(0, |acc, p| acc * 15 + digit_of_production(p))
    }

    /// Production for a 2-bit block value.
    pub fn production(&self, block: u8) -> &BitString {
        &self.productions[block as usize]
    }

    /// 0 <-> 1 swapped on both block keys and productions.
    pub fn complemented(&self) -> Self {
        TagRuleSet {
            productions: std::array::from_fn(|b| self.productions[3 - b].complemented()),
        }
    }
}

impl fmt::Display for TagRuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, p) in self.productions.iter().enumerate() {
            let block = format!("{}{}", (b >> 1) & 1, b & 1);
            if p.is_empty() {
                writeln!(f, "{block} -> e")?;
            } else {
                writeln!(f, "{block} -> {p}")?;
            }
        }
        Ok(())
    }
}

/// Iterates until the word is shorter than the deletion number or
/// `max_steps` steps have run; the output is the final word (possibly
/// empty).
pub fn run_tag(rules: &TagRuleSet, init: &BitString, max_steps: u32) -> MachineOutput {
    let mut word: VecDeque<u8> = init.iter().collect();
    let mut steps = 0;
    while steps < max_steps && word.len() >= TAG_DELETION_NUMBER {
        let first = word.pop_front().unwrap();
        let second = word.pop_front().unwrap();
        let block = (first << 1) | second;
        word.extend(rules.production(block).iter());
        steps += 1;
    }
    MachineOutput {
        bits: word.into_iter().collect(),
        machine_class: MachineClass::Ts,
        machine_index: rules.encode(),
        initial_condition: InitialCondition::Word(init.clone()),
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rules_from(strs: [&str; 4]) -> TagRuleSet {
        TagRuleSet::new(std::array::from_fn(|b| BitString::parse(strs[b]).unwrap())).unwrap()
    }

    #[test]
    fn production_enumeration_is_length_then_lex() {
        let expected = [
            "", "0", "1", "00", "01", "10", "11", "000", "001", "010", "011", "100", "101", "110",
            "111",
        ];
        for (d, s) in expected.iter().enumerate() {
            assert_eq!(production_by_digit(d as u64).to_string(), *s);
            assert_eq!(digit_of_production(&BitString::parse(s).unwrap()), d as u64);
        }
    }

    #[test]
    fn index_bounds() {
        assert_eq!(TAG_CLASS_SIZE, 50_625);
        let zero = TagRuleSet::decode(0).unwrap();
        assert!((0..4).all(|b| zero.production(b).is_empty()));
        let last = TagRuleSet::decode(TAG_CLASS_SIZE - 1).unwrap();
        assert!((0..4).all(|b| last.production(b).to_string() == "111"));
        assert!(TagRuleSet::decode(TAG_CLASS_SIZE).is_err());
    }

    #[test]
    fn round_trip_over_entire_class() {
        for i in 0..TAG_CLASS_SIZE {
            assert_eq!(TagRuleSet::decode(i).unwrap().encode(), i);
        }
    }

    #[test]
    fn empty_productions_halt_immediately() {
        let rules = rules_from(["", "", "", ""]);
        let out = run_tag(&rules, &BitString::parse("00").unwrap(), 100);
        assert!(out.bits.is_empty());
        assert_eq!(out.steps, 1);
    }

    #[test]
    fn growth_by_one_per_step() {
        let rules = rules_from(["111", "0", "0", "111"]);
        let mut word = BitString::parse("11").unwrap();
        for step in 1..=5u32 {
            let out = run_tag(&rules, &BitString::parse("11").unwrap(), step);
            word = {
                // Independent hand-trace: delete "11", append "111".
                let mut bits: Vec<u8> = word.iter().skip(2).collect();
                bits.extend([1, 1, 1]);
                BitString::from_bits(bits)
            };
            assert_eq!(out.bits, word);
            assert_eq!(out.bits.len(), 2 + step as usize);
        }
        assert_eq!(
            run_tag(&rules, &BitString::parse("11").unwrap(), 4)
                .bits
                .to_string(),
            "111111"
        );
    }

    #[test]
    fn complement_closure() {
        for i in [0u64, 1, 77, 5000, 50_624] {
            let rules = TagRuleSet::decode(i).unwrap();
            let comp = rules.complemented();
            assert!(comp.encode() < TAG_CLASS_SIZE);
            for init in ["00", "01", "10", "11"] {
                let w = BitString::parse(init).unwrap();
                let a = run_tag(&rules, &w, 40);
                let b = run_tag(&comp, &w.complemented(), 40);
                assert_eq!(a.bits.complemented(), b.bits);
                assert_eq!(a.steps, b.steps);
            }
        }
    }
}
