//! The three machine classes: deterministic Turing machines, one-dimensional
//! cellular automata with two left neighbors and one right neighbor, and
//! 2-Tag systems. Each class has a canonical bijective integer encoding so
//! that sampling by index is reproducible, and a fixed-step simulator that
//! produces a [`BitString`] output.

mod ca;
mod tag;
mod tm;

pub use ca::{run_ca, CaRule};
pub use tag::{run_tag, TagRuleSet, TAG_CLASS_SIZE, TAG_DELETION_NUMBER, TAG_MAX_PRODUCTION_LEN};
pub use tm::{run_tm, Direction, TmRule, TmRuleTable};

use serde::{Deserialize, Serialize};

use crate::bits::BitString;

/// Which abstract machine family produced an output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MachineClass {
    #[serde(rename = "TM")]
    Tm,
    #[serde(rename = "CA")]
    Ca,
    #[serde(rename = "TS")]
    Ts,
}

impl MachineClass {
    pub fn label(&self) -> &'static str {
        match self {
            MachineClass::Tm => "TM",
            MachineClass::Ca => "CA",
            MachineClass::Ts => "TS",
        }
    }
}

impl std::fmt::Display for MachineClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// How a run was started.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitialCondition {
    /// Turing machine tape filled with this symbol.
    BlankTape(u8),
    /// Cellular automaton background value; the seed cell holds its opposite.
    Background(u8),
    /// Tag system initial word.
    Word(BitString),
}

impl std::fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialCondition::BlankTape(b) => write!(f, "blank-{b}"),
            InitialCondition::Background(b) => write!(f, "background-{b}"),
            InitialCondition::Word(w) => write!(f, "word-{w}"),
        }
    }
}

/// A machine run's output string plus provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineOutput {
    pub bits: BitString,
    pub machine_class: MachineClass,
    pub machine_index: u64,
    pub initial_condition: InitialCondition,
    /// Steps actually executed (equals the requested budget except for Tag
    /// systems, which may halt early by exhaustion).
    pub steps: u32,
}
