//! `algoprob` — machine-distribution experiments from the command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use algoprob::stats::TiePolicy;
use config::{load_config, Config, Overrides, Plan};

/// Config errors exit 2, data errors 3, runtime failures 4.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "algoprob",
    about = "Empirical algorithmic-probability experiments: machine output \
             distributions, physical-data ingestion, rank-correlation \
             comparison, algorithmicity scoring and prior-codebook \
             compression",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonFlags {
    /// Experiment config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tuple lengths, e.g. --k 4,5,6,7.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u8>>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides sample sizes of sampling machine specs.
    #[arg(long)]
    sample_size: Option<u64>,
    /// Overrides machine step budgets.
    #[arg(long)]
    steps: Option<u32>,
    /// Rank tie policy: fractional (default) or paper.
    #[arg(long, value_enum)]
    tie_policy: Option<TiePolicyArg>,
    /// Permutation-test trials.
    #[arg(long)]
    permutations: Option<u32>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum TiePolicyArg {
    Fractional,
    Paper,
}

impl From<TiePolicyArg> for TiePolicy {
    fn from(a: TiePolicyArg) -> Self {
        match a {
            TiePolicyArg::Fractional => TiePolicy::Fractional,
            TiePolicyArg::Paper => TiePolicy::Paper,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run machine-sampling experiments and write tuple distributions.
    Generate {
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Convert physical sources (files, FASTA, images) into distributions.
    Ingest {
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Correlation matrices and plot series for distribution files.
    Compare {
        #[command(flatten)]
        common: CommonFlags,
        /// Distribution .json files to compare (grouped by k).
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Algorithmicity report of a distribution against a reference.
    Score {
        #[command(flatten)]
        common: CommonFlags,
        /// Distribution under test (.json).
        #[arg(long)]
        data: PathBuf,
        /// Reference (machine) distribution (.json).
        #[arg(long)]
        reference: PathBuf,
        /// Rows in the complexity table.
        #[arg(long, default_value_t = 16)]
        top: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Encode a file with a prior codebook built from a reference
    /// distribution.
    Compress {
        /// File to compress.
        #[arg(long)]
        input: PathBuf,
        /// Reference distribution (.json) to build the codebook from.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Serialized codebook (.json) to reuse.
        #[arg(long)]
        codebook: Option<PathBuf>,
        /// Payload output path.
        #[arg(long)]
        out: PathBuf,
        /// Also write the codebook here.
        #[arg(long)]
        save_codebook: Option<PathBuf>,
    },
    /// Decode a payload produced by compress.
    Decompress {
        /// Payload to decode.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        codebook: Option<PathBuf>,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: generate + ingest + compare, plus a summary file.
    Report {
        #[command(flatten)]
        common: CommonFlags,
    },
}

fn plan_from(common: &CommonFlags) -> Result<Plan, CliError> {
    let config = match &common.config {
        Some(path) => load_config(path)?,
        None => Config::default(),
    };
    config.resolve(&Overrides {
        k: common.k.clone(),
        out: common.out.clone(),
        seed: common.seed,
        sample_size: common.sample_size,
        steps: common.steps,
        tie_policy: common.tie_policy.map(Into::into),
        permutations: common.permutations,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { common } => commands::generate(&plan_from(&common)?),
        Command::Ingest { common } => commands::ingest(&plan_from(&common)?),
        Command::Compare { common, inputs } => {
            let plan = plan_from(&common)?;
            commands::compare(&inputs, &plan.out, &plan.stats)
        }
        Command::Score {
            common,
            data,
            reference,
            top,
            report,
        } => {
            let plan = plan_from(&common)?;
            let text = commands::score(&data, &reference, &plan.stats, top)?;
            match report {
                Some(path) => output::write_atomic(&path, text.as_bytes()),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Compress {
            input,
            reference,
            codebook,
            out,
            save_codebook,
        } => {
            let text = commands::compress(
                &input,
                reference.as_ref(),
                codebook.as_ref(),
                &out,
                save_codebook.as_ref(),
            )?;
            print!("{text}");
            Ok(())
        }
        Command::Decompress {
            input,
            reference,
            codebook,
            out,
        } => commands::decompress(&input, reference.as_ref(), codebook.as_ref(), &out),
        Command::Report { common } => commands::report(&plan_from(&common)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
