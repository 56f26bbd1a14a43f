//! Machine-sampling experiments: select machines from a class (exhaustively
//! or by seeded sampling without replacement), run each under its full set
//! of initial conditions, and aggregate every output into one k-tuple
//! distribution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{DistMeta, TupleAccumulator, TupleDistribution};
use crate::error::{Error, Result};
use crate::machines::{
    run_ca, run_tag, run_tm, CaRule, MachineClass, TagRuleSet, TmRuleTable, TAG_CLASS_SIZE,
};
use crate::rng::{sample_without_replacement, Xoshiro256};
use crate::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    /// Every index of the class exactly once.
    Exhaustive,
    /// `sample_size` distinct indices drawn uniformly with the recorded
    /// seed.
    Sample,
}

/// What to run: a machine class, how many machines, for how long.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub machine_class: MachineClass,
    /// Turing machines only; ignored by the other classes.
    pub n_states: u16,
    pub mode: SampleMode,
    pub sample_size: u64,
    pub seed: u64,
    pub steps: u32,
}

pub const DEFAULT_SAMPLE_SIZE: u64 = 2000;
pub const DEFAULT_STEPS: u32 = 100;
pub const DEFAULT_TM_STATES: u16 = 3;

impl SampleSpec {
    pub fn exhaustive(machine_class: MachineClass) -> Self {
        SampleSpec {
            machine_class,
            n_states: DEFAULT_TM_STATES,
            mode: SampleMode::Exhaustive,
            sample_size: 0,
            seed: 0,
            steps: DEFAULT_STEPS,
        }
    }

    pub fn sample(machine_class: MachineClass, sample_size: u64, seed: u64) -> Self {
        SampleSpec {
            machine_class,
            n_states: DEFAULT_TM_STATES,
            mode: SampleMode::Sample,
            sample_size,
            seed,
            steps: DEFAULT_STEPS,
        }
    }

    pub fn with_steps(mut self, steps: u32) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_n_states(mut self, n_states: u16) -> Self {
        self.n_states = n_states;
        self
    }

    /// Number of distinct machines in the class this spec draws from.
    pub fn class_size(&self) -> Result<u64> {
        match self.machine_class {
            MachineClass::Tm => TmRuleTable::class_size(self.n_states),
            MachineClass::Ca => Ok(CaRule::CLASS_SIZE),
            MachineClass::Ts => Ok(TAG_CLASS_SIZE),
        }
    }

    fn descriptor(&self) -> DistMeta {
        DistMeta {
            class: Some(self.machine_class.label().to_string()),
            spec: Some(self.clone()),
            seed: Some(self.seed),
            source: None,
        }
    }
}

/// All outputs of machine `index` under the spec's initial-condition
/// protocol: both blank tapes for TMs, both backgrounds for CAs, all four
/// 2-bit words for Tag systems.
pub fn machine_outputs(spec: &SampleSpec, index: u64) -> Vec<BitString> {
    match spec.machine_class {
        MachineClass::Tm => {
            let table = TmRuleTable::decode(index, spec.n_states).expect("index in range");
            [0u8, 1]
                .iter()
                .map(|&blank| run_tm(&table, blank, spec.steps).bits)
                .collect()
        }
        MachineClass::Ca => {
            let rule = CaRule::decode(index).expect("index in range");
            [0u8, 1]
                .iter()
                .map(|&bg| run_ca(&rule, bg, spec.steps).bits)
                .collect()
        }
        MachineClass::Ts => {
            let rules = TagRuleSet::decode(index).expect("index in range");
            [[0u8, 0], [0, 1], [1, 0], [1, 1]]
                .iter()
                .map(|init| {
                    let word = BitString::from_bits(init.to_vec());
                    run_tag(&rules, &word, spec.steps).bits
                })
                .collect()
        }
    }
}

fn accumulate_runs<I>(indices: I, spec: &SampleSpec, k: u8) -> Result<TupleDistribution>
where
    I: IntoParallelIterator<Item = u64>,
{
    let acc = indices
        .into_par_iter()
        .fold(
            || TupleAccumulator::new(k).expect("k validated"),
            |mut acc, index| {
                for bits in machine_outputs(spec, index) {
                    acc.add_bits(&bits);
                }
                acc
            },
        )
        .reduce(
            || TupleAccumulator::new(k).expect("k validated"),
            TupleAccumulator::merge,
        );
    Ok(acc.finish(spec.descriptor()))
}

/// Runs the experiment a spec describes and aggregates all outputs into one
/// distribution. Deterministic for a given spec: sampling uses the recorded
/// seed and aggregation is a commutative integer merge, so any parallel
/// schedule produces identical counts.
pub fn machine_experiment(spec: &SampleSpec, k: u8) -> Result<TupleDistribution> {
    crate::distribution::check_k(k)?;
    let size = spec.class_size()?;
    match spec.mode {
        SampleMode::Exhaustive => accumulate_runs(0..size, spec, k),
        SampleMode::Sample => {
            if spec.sample_size > size {
                return Err(Error::SampleTooLarge {
                    requested: spec.sample_size,
                    available: size,
                });
            }
            let mut rng = Xoshiro256::seeded(spec.seed);
            let indices = sample_without_replacement(&mut rng, size, spec.sample_size);
            accumulate_runs(indices, spec, k)
        }
    }
}
