//! Deterministic 2-symbol Turing machines in the 5-tuple formalism: no halt
//! state, no distinguished blank symbol, every machine runs for exactly the
//! requested number of steps.

use std::fmt;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::machines::{InitialCondition, MachineClass, MachineOutput};

/// Head movement after writing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    fn flipped(self) -> Self {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Left => "L",
            Direction::Right => "R",
        })
    }
}

/// One transition: what to write, where to move, which state to enter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TmRule {
    pub write: u8,
    pub direction: Direction,
    /// 1-based next state.
    pub next_state: u16,
}

/// A total transition table over `n_states` states and symbols {0,1}.
///
/// Rule lookup is by (1-based state, read symbol). There are `(4n)^(2n)`
/// distinct tables for `n` states, and [`TmRuleTable::decode`] /
/// [`TmRuleTable::encode`] form a bijection with `0..(4n)^(2n)`: the index
/// written in base `4n` with `2n` digits, least significant digit first,
/// assigns digit `j` to the pair (state `j/2 + 1`, read symbol `j % 2`);
/// digit value `a` decodes as write `a % 2`, direction `(a/2) % 2`
/// (0 left, 1 right), next state `a/4 + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmRuleTable {
    n_states: u16,
    /// Indexed by `(state-1)*2 + read_symbol`.
    rules: Vec<TmRule>,
}

impl TmRuleTable {
    /// `(4n)^(2n)`, the number of distinct n-state tables.
    pub fn class_size(n_states: u16) -> Result<u64> {
        if n_states == 0 {
            return Err(Error::InvalidStateCount);
        }
        let base = 4 * n_states as u64;
        let mut size: u64 = 1;
        for _ in 0..2 * n_states {
            size = size.checked_mul(base).ok_or(Error::ClassSizeOverflow {
                class: "TM",
                n_states,
            })?;
        }
        Ok(size)
    }

    pub fn decode(index: u64, n_states: u16) -> Result<Self> {
        let size = Self::class_size(n_states)?;
        if index >= size {
            return Err(Error::IndexOutOfRange {
                class: "TM",
                index,
                size,
            });
        }
        let base = 4 * n_states as u64;
        let mut rest = index;
        let rules = (0..2 * n_states)
            .map(|_| {
                let digit = rest % base;
                rest /= base;
                TmRule {
                    write: (digit % 2) as u8,
                    direction: if (digit / 2).is_multiple_of(2) {
                        Direction::Left
                    } else {
                        Direction::Right
                    },
                    next_state: (digit / 4) as u16 + 1,
                }
            })
            .collect();
        Ok(TmRuleTable { n_states, rules })
    }

    /// Inverse of [`TmRuleTable::decode`].
    pub fn encode(&self) -> u64 {
        let base = 4 * self.n_states as u64;
        let mut index = 0u64;
        for rule in self.rules.iter().rev() {
            let dir = match rule.direction {
                Direction::Left => 0u64,
                Direction::Right => 1,
            };
            let digit = rule.write as u64 + 2 * dir + 4 * (rule.next_state as u64 - 1);
            index = index * base + digit;
        }
        index
    }

    pub fn n_states(&self) -> u16 {
        self.n_states
    }

    /// Transition for (1-based state, read symbol).
    pub fn rule(&self, state: u16, read: u8) -> TmRule {
        self.rules[(state as usize - 1) * 2 + read as usize]
    }

    /// The machine with all tape symbols 0 <-> 1 swapped. Running it on the
    /// complemented blank tape produces the bitwise complement output.
    pub fn complemented(&self) -> Self {
        let rules = (0..self.rules.len())
            .map(|i| {
                let swapped = self.rules[i ^ 1];
                TmRule {
                    write: 1 - swapped.write,
                    ..swapped
                }
            })
            .collect();
        TmRuleTable {
            n_states: self.n_states,
            rules,
        }
    }

    /// The machine with L <-> R swapped; its output is the reversal.
    pub fn mirrored(&self) -> Self {
        let rules = self
            .rules
            .iter()
            .map(|r| TmRule {
                direction: r.direction.flipped(),
                ..*r
            })
            .collect();
        TmRuleTable {
            n_states: self.n_states,
            rules,
        }
    }
}

/// One rule per line in 5-tuple order (read, state, write, next, direction).
impl fmt::Display for TmRuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for state in 1..=self.n_states {
            for read in 0..2u8 {
                let r = self.rule(state, read);
                writeln!(
                    f,
                    "{{{read},{state},{},{},{}}}",
                    r.write, r.next_state, r.direction
                )?;
            }
        }
        Ok(())
    }
}

/// Runs for exactly `steps` write/move/transition operations on a tape
/// uniformly filled with `blank_symbol`, head starting at cell 0 in state 1.
///
/// The output is the tape content, at the final time, of every cell the head
/// occupied at any time from 0 through `steps` (the final head position
/// included), read left to right.
pub fn run_tm(rules: &TmRuleTable, blank_symbol: u8, steps: u32) -> MachineOutput {
    let span = steps as usize;
    let mut tape = vec![blank_symbol; 2 * span + 1];
    let mut head = span as isize;
    let mut lo = head;
    let mut hi = head;
    let mut state: u16 = 1;

    for _ in 0..steps {
        let r = rules.rule(state, tape[head as usize]);
        tape[head as usize] = r.write;
        head += match r.direction {
            Direction::Left => -1,
            Direction::Right => 1,
        };
        state = r.next_state;
        lo = lo.min(head);
        hi = hi.max(head);
    }

    let bits = BitString::from_bits(tape[lo as usize..=hi as usize].to_vec());
    MachineOutput {
        bits,
        machine_class: MachineClass::Tm,
        machine_index: rules.encode(),
        initial_condition: InitialCondition::BlankTape(blank_symbol),
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256;

    #[test]
    fn class_size_for_three_states() {
        assert_eq!(TmRuleTable::class_size(3).unwrap(), 2_985_984);
        assert_eq!(TmRuleTable::class_size(2).unwrap(), 4096);
        assert!(matches!(
            TmRuleTable::class_size(0),
            Err(Error::InvalidStateCount)
        ));
        assert!(matches!(
            TmRuleTable::class_size(7),
            Err(Error::ClassSizeOverflow { .. })
        ));
    }

    #[test]
    fn index_zero_is_all_write0_left_state1() {
        let t = TmRuleTable::decode(0, 2).unwrap();
        for state in 1..=2 {
            for read in 0..2 {
                let r = t.rule(state, read);
                assert_eq!(r.write, 0);
                assert_eq!(r.direction, Direction::Left);
                assert_eq!(r.next_state, 1);
            }
        }
    }

    #[test]
    fn decode_rejects_out_of_range() {
        let size = TmRuleTable::class_size(2).unwrap();
        assert!(matches!(
            TmRuleTable::decode(size, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn encode_decode_round_trip_random_draws() {
        let size = TmRuleTable::class_size(3).unwrap();
        let mut rng = Xoshiro256::seeded(0xA11CE);
        for _ in 0..10_000 {
            let i = rng.below(size);
            assert_eq!(TmRuleTable::decode(i, 3).unwrap().encode(), i);
        }
    }

    #[test]
    fn right_mover_writes_ones() {
        // In state 1 on any symbol: write 1, move right, stay in state 1.
        let rules = vec![
            TmRule {
                write: 1,
                direction: Direction::Right,
                next_state: 1,
            };
            2
        ];
        let t = TmRuleTable { n_states: 1, rules };
        let out = run_tm(&t, 0, 2);
        assert_eq!(out.bits.to_string(), "110");
    }

    #[test]
    fn left_mover_rewrites_blanks() {
        let t = TmRuleTable::decode(0, 2).unwrap(); // everything -> (0, L, 1)
        let out = run_tm(&t, 0, 4);
        assert_eq!(out.bits.to_string(), "00000");
    }

    #[test]
    fn output_length_bounded_by_steps_plus_one() {
        let size = TmRuleTable::class_size(3).unwrap();
        let mut rng = Xoshiro256::seeded(99);
        for _ in 0..1000 {
            let t = TmRuleTable::decode(rng.below(size), 3).unwrap();
            let out = run_tm(&t, (rng.below(2)) as u8, 37);
            assert!(!out.bits.is_empty());
            assert!(out.bits.len() <= 38);
        }
    }

    #[test]
    fn pretty_print_lists_all_rules() {
        let t = TmRuleTable::decode(0, 2).unwrap();
        let text = t.to_string();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("{0,1,0,1,L}"));
    }
}
