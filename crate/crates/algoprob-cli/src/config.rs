//! Declarative experiment configuration: a TOML document naming machine
//! specs and physical sources, plus the statistics options. Command-line
//! flags override config values.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use algoprob::experiment::{
    SampleMode, SampleSpec, DEFAULT_SAMPLE_SIZE, DEFAULT_STEPS, DEFAULT_TM_STATES,
};
use algoprob::ingestion::WindowMode;
use algoprob::stats::{StatsOptions, TiePolicy};
use algoprob::MachineClass;

use crate::CliError;

pub const DEFAULT_K: &[u8] = &[4, 5, 6, 7];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Tuple lengths to run everything at.
    pub k: Option<Vec<u8>>,
    /// Output directory.
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub stats: StatsConfig,
    #[serde(default)]
    pub machines: Vec<MachineConfig>,
    #[serde(default)]
    pub sources: Vec<SourceConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsConfig {
    pub tie_policy: Option<TiePolicy>,
    pub permutations: Option<u32>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineConfig {
    pub name: String,
    pub class: MachineClassName,
    pub mode: Option<SampleModeName>,
    pub sample_size: Option<u64>,
    pub steps: Option<u32>,
    pub seed: Option<u64>,
    pub n_states: Option<u16>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineClassName {
    Tm,
    Ca,
    Ts,
}

impl From<MachineClassName> for MachineClass {
    fn from(name: MachineClassName) -> Self {
        match name {
            MachineClassName::Tm => MachineClass::Tm,
            MachineClassName::Ca => MachineClass::Ca,
            MachineClassName::Ts => MachineClass::Ts,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleModeName {
    Exhaustive,
    Sample,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub name: String,
    pub kind: SourceKind,
    pub path: PathBuf,
    /// Sample this many files from a directory (seeded).
    pub sample: Option<u64>,
    pub seed: Option<u64>,
    /// Per-file byte cap for kind = "files".
    pub max_bytes: Option<u64>,
    pub window: Option<WindowMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Files,
    Fasta,
    Image,
}

/// Flag overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub k: Option<Vec<u8>>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub sample_size: Option<u64>,
    pub steps: Option<u32>,
    pub tie_policy: Option<TiePolicy>,
    pub permutations: Option<u32>,
}

/// A validated experiment plan.
#[derive(Debug)]
pub struct Plan {
    pub k: Vec<u8>,
    pub out: PathBuf,
    pub stats: StatsOptions,
    pub machines: Vec<(String, SampleSpec)>,
    pub sources: Vec<SourcePlan>,
}

#[derive(Debug, Clone)]
pub struct SourcePlan {
    pub name: String,
    pub kind: SourceKind,
    pub path: PathBuf,
    pub sample: Option<u64>,
    pub seed: u64,
    pub max_bytes: u64,
    pub window: WindowMode,
}

pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

impl Config {
    /// Validates and resolves the config with overrides into a plan.
    pub fn resolve(self, overrides: &Overrides) -> Result<Plan, CliError> {
        let k = overrides
            .k
            .clone()
            .or(self.k)
            .unwrap_or_else(|| DEFAULT_K.to_vec());
        if k.is_empty() {
            return Err(CliError::Config("empty k list".into()));
        }
        for &kk in &k {
            if kk == 0 || kk > algoprob::distribution::MAX_K {
                return Err(CliError::Config(format!(
                    "k={kk} outside 1..={}",
                    algoprob::distribution::MAX_K
                )));
            }
        }
        let out = overrides
            .out
            .clone()
            .or(self.out)
            .unwrap_or_else(|| PathBuf::from("."));

        let stats = StatsOptions {
            tie_policy: overrides
                .tie_policy
                .or(self.stats.tie_policy)
                .unwrap_or_default(),
            permutations: overrides
                .permutations
                .or(self.stats.permutations)
                .unwrap_or(10_000),
            seed: overrides.seed.or(self.stats.seed).unwrap_or(0),
        };
        if stats.permutations == 0 {
            return Err(CliError::Config("permutations must be at least 1".into()));
        }

        let mut names = BTreeSet::new();
        let mut machines = Vec::new();
        for m in &self.machines {
            if !names.insert(m.name.clone()) {
                return Err(CliError::Config(format!("duplicate name {:?}", m.name)));
            }
            machines.push((m.name.clone(), m.to_spec(overrides)?));
        }

        let mut sources = Vec::new();
        for s in &self.sources {
            if !names.insert(s.name.clone()) {
                return Err(CliError::Config(format!("duplicate name {:?}", s.name)));
            }
            if !s.path.exists() {
                return Err(CliError::Config(format!(
                    "source {:?}: path {} does not exist",
                    s.name,
                    s.path.display()
                )));
            }
            sources.push(SourcePlan {
                name: s.name.clone(),
                kind: s.kind,
                path: s.path.clone(),
                sample: s.sample,
                seed: overrides.seed.or(s.seed).unwrap_or(0),
                max_bytes: s
                    .max_bytes
                    .unwrap_or(algoprob::ingestion::DEFAULT_MAX_FILE_BYTES),
                window: s.window.unwrap_or_default(),
            });
        }

        Ok(Plan {
            k,
            out,
            stats,
            machines,
            sources,
        })
    }
}

impl MachineConfig {
    fn to_spec(&self, overrides: &Overrides) -> Result<SampleSpec, CliError> {
        let mode = match self.mode {
            Some(SampleModeName::Exhaustive) => SampleMode::Exhaustive,
            Some(SampleModeName::Sample) | None => SampleMode::Sample,
        };
        let spec = SampleSpec {
            machine_class: self.class.into(),
            n_states: self.n_states.unwrap_or(DEFAULT_TM_STATES),
            mode,
            sample_size: overrides
                .sample_size
                .or(self.sample_size)
                .unwrap_or(DEFAULT_SAMPLE_SIZE),
            seed: overrides.seed.or(self.seed).unwrap_or(0),
            steps: overrides.steps.or(self.steps).unwrap_or(DEFAULT_STEPS),
        };
        if spec.steps == 0 {
            return Err(CliError::Config(format!(
                "machine {:?}: steps must be at least 1",
                self.name
            )));
        }
        spec.class_size()
            .map_err(|e| CliError::Config(format!("machine {:?}: {e}", self.name)))?;
        Ok(spec)
    }
}
