//! One-dimensional binary cellular automata whose update window spans two
//! cells to the left and one to the right (a 4-cell neighborhood, so 2^16
//! rules).

use std::fmt;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::machines::{InitialCondition, MachineClass, MachineOutput};

/// A rule table over the 16 possible 4-cell neighborhoods.
///
/// The neighborhood of cell `x` at step `t+1` is `(x-2, x-1, x, x+1)` at
/// step `t`, read as a 4-bit number with `x-2` most significant; the new
/// cell value is bit `nb` of `code`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CaRule {
    code: u16,
}

impl CaRule {
    pub const CLASS_SIZE: u64 = 1 << 16;
    pub const LEFT_NEIGHBORS: usize = 2;
    pub const RIGHT_NEIGHBORS: usize = 1;

    pub fn new(code: u16) -> Self {
        CaRule { code }
    }

    pub fn decode(index: u64) -> Result<Self> {
        if index >= Self::CLASS_SIZE {
            return Err(Error::IndexOutOfRange {
                class: "CA",
                index,
                size: Self::CLASS_SIZE,
            });
        }
        Ok(CaRule { code: index as u16 })
    }

    pub fn code(&self) -> u16 {
        self.code
    }

    /// New value for neighborhood (l2, l1, c, r1).
    pub fn apply(&self, l2: u8, l1: u8, c: u8, r1: u8) -> u8 {
        let nb = (l2 << 3) | (l1 << 2) | (c << 1) | r1;
        ((self.code >> nb) & 1) as u8
    }

    /// The color-conjugate rule: swap 0 <-> 1 in both neighborhoods and
    /// outputs. Running it from the complemented initial condition yields
    /// the complemented output.
    pub fn conjugated(&self) -> Self {
        let mut code = 0u16;
        for nb in 0..16 {
            let bit = (self.code >> (15 - nb)) & 1;
            code |= (1 - bit) << nb;
        }
        CaRule { code }
    }
}

/// One neighborhood per line, most significant first.
impl fmt::Display for CaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for nb in (0..16u16).rev() {
            writeln!(
                f,
                "{{{},{},{},{}}} -> {}",
                (nb >> 3) & 1,
                (nb >> 2) & 1,
                (nb >> 1) & 1,
                nb & 1,
                (self.code >> nb) & 1
            )?;
        }
        Ok(())
    }
}

/// Evolves a single seed cell (the opposite color of `background`) at
/// position 0 on an infinite uniform background for `steps` steps and
/// returns the final row restricted to the influence cone `[-t, 2t]`
/// (width `1 + 3t`).
///
/// Cells outside the cone follow the background's own evolution, which is
/// tracked explicitly so rules that flip the uniform background are exact.
pub fn run_ca(rule: &CaRule, background: u8, steps: u32) -> MachineOutput {
    let t = steps as usize;
    // Absolute positions [-t-2, 2t+2]; index = position + t + 2.
    let offset = t + 2;
    let width = 3 * t + 5;
    let mut lut = [0u8; 16];
    for (nb, out) in lut.iter_mut().enumerate() {
        *out = ((rule.code >> nb) & 1) as u8;
    }

    let mut row = vec![background; width];
    let mut next = vec![0u8; width];
    row[offset] = 1 - background;
    let mut bg = background;

    for _ in 0..t {
        // Sliding 4-bit neighborhood; cells off the array equal the
        // uniform background of the previous step.
        let mut nb: usize = ((bg as usize) << 3)
            | ((bg as usize) << 2)
            | ((row[0] as usize) << 1)
            | row[1] as usize;
        for x in 0..width {
            next[x] = lut[nb];
            let incoming = if x + 2 < width { row[x + 2] } else { bg };
            nb = ((nb << 1) & 0xF) | incoming as usize;
        }
        std::mem::swap(&mut row, &mut next);
        bg = lut[((bg as usize) << 3) | ((bg as usize) << 2) | ((bg as usize) << 1) | bg as usize];
    }

    let cone = &row[offset - t..=offset + 2 * t];
    MachineOutput {
        bits: BitString::from_bits(cone.to_vec()),
        machine_class: MachineClass::Ca,
        machine_index: rule.code as u64,
        initial_condition: InitialCondition::Background(background),
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256;

    #[test]
    fn constant_rules_produce_constant_rows() {
        let ones = run_ca(&CaRule::new(0xFFFF), 0, 100);
        assert_eq!(ones.bits.len(), 301);
        assert!(ones.bits.iter().all(|b| b == 1));

        let zeros = run_ca(&CaRule::new(0), 0, 100);
        assert_eq!(zeros.bits.len(), 301);
        assert!(zeros.bits.iter().all(|b| b == 0));
    }

    #[test]
    fn cone_width_is_one_plus_three_t() {
        let mut rng = Xoshiro256::seeded(5);
        for _ in 0..50 {
            let rule = CaRule::new(rng.next_u64() as u16);
            let steps = 1 + (rng.below(40)) as u32;
            let out = run_ca(&rule, (rng.below(2)) as u8, steps);
            assert_eq!(out.bits.len(), 1 + 3 * steps as usize);
        }
    }

    #[test]
    fn decode_rejects_out_of_range() {
        assert!(CaRule::decode(65_536).is_err());
        assert_eq!(CaRule::decode(65_535).unwrap().code(), 65_535);
    }

    /// Brute-force reference: simulate on an explicitly wide array with no
    /// cone or background logic, wide enough that edges cannot reach the
    /// cone, then cut out [-t, 2t].
    fn wide_reference(rule: &CaRule, background: u8, t: usize) -> Vec<u8> {
        let pad = 2 * t + 4;
        let width = 3 * t + 1 + 2 * pad;
        let seed_at = pad + t; // absolute position 0
        let mut row = vec![background; width];
        row[seed_at] = 1 - background;
        for _ in 0..t {
            let mut next = row.clone();
            for x in 2..width - 1 {
                next[x] = rule.apply(row[x - 2], row[x - 1], row[x], row[x + 1]);
            }
            // Edge cells inherit the uniform evolution of their neighbors.
            let b = rule.apply(row[0], row[0], row[0], row[0]);
            next[0] = b;
            next[1] = b;
            next[width - 1] = b;
            row = next;
        }
        row[pad..pad + 3 * t + 1].to_vec()
    }

    #[test]
    fn cone_simulation_matches_wide_array() {
        let mut rng = Xoshiro256::seeded(2024);
        for _ in 0..200 {
            let rule = CaRule::new(rng.next_u64() as u16);
            let bg = (rng.below(2)) as u8;
            let out = run_ca(&rule, bg, 30);
            assert_eq!(out.bits.bits(), wide_reference(&rule, bg, 30));
        }
    }

    #[test]
    fn conjugation_is_an_involution() {
        let mut rng = Xoshiro256::seeded(8);
        for _ in 0..100 {
            let rule = CaRule::new(rng.next_u64() as u16);
            assert_eq!(rule.conjugated().conjugated(), rule);
        }
    }

    #[test]
    fn conjugate_run_is_complement() {
        let mut rng = Xoshiro256::seeded(13);
        for _ in 0..100 {
            let rule = CaRule::new(rng.next_u64() as u16);
            let a = run_ca(&rule, 0, 25);
            let b = run_ca(&rule.conjugated(), 1, 25);
            assert_eq!(a.bits.complemented(), b.bits);
        }
    }
}
