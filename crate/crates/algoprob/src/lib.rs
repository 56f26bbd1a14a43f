//! Empirical algorithmic-probability toolkit.
//!
//! The library approximates the output-frequency distribution of small
//! abstract machines (Turing machines, one-dimensional cellular automata,
//! 2-Tag systems), converts physical data (raw files, DNA sequences,
//! raster images) into comparable k-tuple frequency distributions, compares
//! distributions by Spearman rank correlation with permutation-test
//! significance, and derives two applications from the machine
//! distributions: a static-prior block compressor and relative
//! algorithmicity / complexity estimates.
//!
//! Everything that counts is counted in exact integers; every derived
//! real-valued quantity (probabilities, correlation coefficients, p-values,
//! distances, entropies) is generic over the [`Real`] scalar, with `f64`
//! aliases exported below. All sampling is driven by explicit seeds and
//! replays bit-for-bit.

pub mod bits;
pub mod distribution;
pub mod error;
pub mod experiment;
pub mod ingestion;
pub mod machines;
pub mod priorcoder;
pub mod real;
pub mod rng;
pub mod stats;

pub use bits::BitString;
pub use distribution::{
    extract_tuples, tuple_label, DistMeta, RankedDistribution, TupleCode, TupleDistribution,
};
pub use error::{Error, Result};
pub use experiment::{machine_experiment, SampleMode, SampleSpec};
pub use machines::{MachineClass, MachineOutput};
pub use real::Real;

/// Concrete scalar used by the command-line tools.
pub type Scalar = f64;
/// [`stats::CorrelationResult`] at the default scalar.
pub type Correlation = stats::CorrelationResult<Scalar>;
/// [`stats::CorrelationMatrix`] at the default scalar.
pub type Matrix = stats::CorrelationMatrix<Scalar>;
/// [`stats::AlgorithmicityReport`] at the default scalar.
pub type Algorithmicity = stats::AlgorithmicityReport<Scalar>;
/// [`priorcoder::CompressionReport`] at the default scalar.
pub type Compression = priorcoder::CompressionReport<Scalar>;
