//! Converting physical data sources into tuple distributions: raw files as
//! MSB-first bit streams, FASTA sequences under all four single-bit DNA
//! encodings jointly, and raster images binarized by a global Otsu
//! threshold and windowed per row.

mod dna;
mod files;
mod image;
mod manifest;

pub use dna::{encode_dna, ingest_fasta, ingest_fasta_text, parse_fasta, FastaRecord};
pub use files::{ingest_bytes, ingest_file, WindowMode, DEFAULT_MAX_FILE_BYTES};
pub use image::{
    binarize, ingest_image, ingest_image_bytes, otsu_threshold, parse_pnm, Binarized, BitMatrix,
    GrayImage, Pnm, RgbImage, MAX_LINEAR_PIXELS,
};
pub use manifest::{list_files, sha256_hex, ManifestEntry};
