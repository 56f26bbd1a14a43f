//! Raster images: portable anymap parsing (PGM/PPM, ASCII and binary),
//! luminance reduction, global Otsu thresholding, and per-row tuple
//! extraction from the binarized matrix.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::bits::BitString;
use crate::distribution::{DistMeta, SourceDescriptor, TupleAccumulator, TupleDistribution};
use crate::error::{Error, Result};
use crate::ingestion::files::{add_windows, WindowMode};
use crate::ingestion::manifest::sha256_hex;

/// Images with width + height over this are rejected.
pub const MAX_LINEAR_PIXELS: usize = 1500;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major samples.
    pub pixels: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major RGB triples.
    pub pixels: Vec<[u16; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pnm {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl Pnm {
    pub fn dimensions(&self) -> (usize, usize) {
        match self {
            Pnm::Gray(g) => (g.width, g.height),
            Pnm::Rgb(c) => (c.width, c.height),
        }
    }

    /// Color reduces to luminance 0.299R + 0.587G + 0.114B, rounded to the
    /// nearest integer.
    pub fn to_gray(self) -> GrayImage {
        match self {
            Pnm::Gray(g) => g,
            Pnm::Rgb(c) => GrayImage {
                width: c.width,
                height: c.height,
                maxval: c.maxval,
                pixels: c
                    .pixels
                    .iter()
                    .map(|&[r, g, b]| {
                        (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64).round() as u16
                    })
                    .collect(),
            },
        }
    }
}

struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedImage("unexpected end of header".into()));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedImage(format!("bad {what} field")))
    }
}

/// Parses P2/P5 (grayscale) and P3/P6 (RGB) portable anymaps, including
/// header comments and 16-bit binary samples.
pub fn parse_pnm(bytes: &[u8]) -> Result<Pnm> {
    let mut t = Tokens { bytes, pos: 0 };
    let magic = t.token()?;
    let (channels, ascii) = match magic {
        b"P2" => (1usize, true),
        b"P3" => (3, true),
        b"P5" => (1, false),
        b"P6" => (3, false),
        other => {
            return Err(Error::MalformedImage(format!(
                "unsupported magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = t.number("width")? as usize;
    let height = t.number("height")? as usize;
    let maxval = t.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedImage("zero image dimension".into()));
    }
    if maxval == 0 || maxval > 65_535 {
        return Err(Error::MalformedImage(format!(
            "maxval {maxval} out of range"
        )));
    }
    let maxval = maxval as u16;
    let n_samples = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(channels))
        .ok_or_else(|| Error::MalformedImage("image dimensions overflow".into()))?;

    let mut samples = Vec::with_capacity(n_samples);
    if ascii {
        for _ in 0..n_samples {
            let v = t.number("sample")?;
            if v > maxval as u64 {
                return Err(Error::MalformedImage(format!(
                    "sample {v} exceeds maxval {maxval}"
                )));
            }
            samples.push(v as u16);
        }
    } else {
        // Exactly one whitespace byte separates maxval from the raster.
        if t.pos >= bytes.len() || !bytes[t.pos].is_ascii_whitespace() {
            return Err(Error::MalformedImage("missing raster separator".into()));
        }
        let mut pos = t.pos + 1;
        let wide = maxval > 255;
        let per = if wide { 2 } else { 1 };
        if bytes.len() < pos + n_samples * per {
            return Err(Error::MalformedImage("raster data truncated".into()));
        }
        for _ in 0..n_samples {
            let v = if wide {
                u16::from_be_bytes([bytes[pos], bytes[pos + 1]])
            } else {
                bytes[pos] as u16
            };
            if v > maxval {
                return Err(Error::MalformedImage(format!(
                    "sample {v} exceeds maxval {maxval}"
                )));
            }
            samples.push(v);
            pos += per;
        }
    }

    Ok(if channels == 1 {
        Pnm::Gray(GrayImage {
            width,
            height,
            maxval,
            pixels: samples,
        })
    } else {
        Pnm::Rgb(RgbImage {
            width,
            height,
            maxval,
            pixels: samples
                .chunks_exact(3)
                .map(|c| [c[0], c[1], c[2]])
                .collect(),
        })
    })
}

/// A rectangular binary matrix (the binarized image).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    pub rows: usize,
    pub cols: usize,
    cells: Vec<u8>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize, cells: Vec<u8>) -> Self {
        assert_eq!(cells.len(), rows * cols);
        BitMatrix { rows, cols, cells }
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.cells[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.cols + c]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binarized {
    pub matrix: BitMatrix,
    pub threshold: u16,
    /// Set when the image is constant and no threshold separates anything;
    /// the output is then all zeros with the threshold at the maximum
    /// value.
    pub degenerate: bool,
}

/// Otsu's between-class-variance threshold over a histogram of `0..=maxval`
/// values. Returns the smallest maximizing threshold; a single-valued
/// histogram is degenerate and thresholds at the maximum.
pub fn otsu_threshold(hist: &[u64]) -> (u16, bool) {
    let total: u64 = hist.iter().sum();
    let nonzero = hist.iter().filter(|&&h| h > 0).count();
    if total == 0 || nonzero <= 1 {
        return ((hist.len() - 1) as u16, true);
    }
    let sum_total: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &h)| v as f64 * h as f64)
        .sum();
    let mut w0 = 0u64;
    let mut sum0 = 0f64;
    let mut best = (0u16, f64::NEG_INFINITY);
    for (v, &h) in hist.iter().enumerate().take(hist.len() - 1) {
        w0 += h;
        sum0 += v as f64 * h as f64;
        if w0 == 0 {
            continue;
        }
        let w1 = total - w0;
        if w1 == 0 {
            break;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_total - sum0) / w1 as f64;
        let var = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        if var > best.1 {
            best = (v as u16, var);
        }
    }
    (best.0, false)
}

/// Binarizes by the global Otsu threshold: value > threshold becomes 1.
pub fn binarize(img: &GrayImage) -> Binarized {
    let mut hist = vec![0u64; img.maxval as usize + 1];
    for &p in &img.pixels {
        hist[p as usize] += 1;
    }
    let (threshold, degenerate) = otsu_threshold(&hist);
    let cells = img
        .pixels
        .iter()
        .map(|&p| u8::from(p > threshold))
        .collect();
    Binarized {
        matrix: BitMatrix::new(img.height, img.width, cells),
        threshold,
        degenerate,
    }
}

fn distribution_from_rows(b: &Binarized, k: u8, mode: WindowMode) -> Result<TupleDistribution> {
    let mut acc = TupleAccumulator::new(k)?;
    for r in 0..b.matrix.rows {
        let row: BitString = b.matrix.row(r).iter().copied().collect();
        add_windows(&mut acc, &row, mode);
    }
    Ok(acc.finish(DistMeta::default()))
}

/// Binarizes and counts k-windows within each row independently; windows
/// never wrap across rows.
pub fn ingest_image_bytes(
    bytes: &[u8],
    k: u8,
    mode: WindowMode,
    origin: &Path,
) -> Result<TupleDistribution> {
    let pnm = parse_pnm(bytes)?;
    let (width, height) = pnm.dimensions();
    let linear = width + height;
    if linear > MAX_LINEAR_PIXELS {
        return Err(Error::OversizeImage {
            path: origin.to_path_buf(),
            linear,
            max: MAX_LINEAR_PIXELS,
        });
    }
    let binarized = binarize(&pnm.to_gray());
    let mut dist = distribution_from_rows(&binarized, k, mode)?;
    let mut parameters = BTreeMap::new();
    parameters.insert("threshold_method".into(), "otsu".into());
    parameters.insert("threshold".into(), binarized.threshold.to_string());
    parameters.insert("degenerate".into(), binarized.degenerate.to_string());
    parameters.insert("window".into(), mode.to_string());
    parameters.insert("max_linear_pixels".into(), MAX_LINEAR_PIXELS.to_string());
    dist.set_meta(DistMeta {
        class: Some("IMG".into()),
        spec: None,
        seed: None,
        source: Some(SourceDescriptor {
            kind: "image".into(),
            path: origin.display().to_string(),
            parameters,
            digest: sha256_hex(bytes),
        }),
    });
    Ok(dist)
}

pub fn ingest_image(path: impl AsRef<Path>, k: u8, mode: WindowMode) -> Result<TupleDistribution> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    ingest_image_bytes(&bytes, k, mode, path)
}
