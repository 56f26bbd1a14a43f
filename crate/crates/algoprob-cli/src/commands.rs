//! Implementations of the CLI subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::json;

use algoprob::distribution::{DistMeta, SourceDescriptor, TupleDistribution};
use algoprob::ingestion::{
    ingest_fasta, ingest_file, ingest_image, list_files, sha256_hex, ManifestEntry,
};
use algoprob::priorcoder::{build_codebook, compression_report, CodeBook};
use algoprob::stats::{self, StatsOptions};
use algoprob::{machine_experiment, Error, Scalar};

use crate::config::{Plan, SourceKind, SourcePlan};
use crate::output::write_atomic;
use crate::CliError;

fn data_err(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{context}: {e}"))
}

fn dist_paths(out: &Path, name: &str, k: u8) -> (PathBuf, PathBuf) {
    (
        out.join(format!("{name}.k{k}.json")),
        out.join(format!("{name}.k{k}.csv")),
    )
}

fn write_distribution(out: &Path, name: &str, d: &TupleDistribution) -> Result<PathBuf, CliError> {
    let (json_path, csv_path) = dist_paths(out, name, d.k());
    write_atomic(&json_path, d.to_json().as_bytes())?;
    write_atomic(&csv_path, d.to_csv().as_bytes())?;
    Ok(json_path)
}

/// `generate`: one distribution file pair per (machine spec, k).
pub fn generate(plan: &Plan) -> Result<(), CliError> {
    if plan.machines.is_empty() {
        return Err(CliError::Config("no [[machines]] configured".into()));
    }
    for (name, spec) in &plan.machines {
        for &k in &plan.k {
            let d = machine_experiment(spec, k)
                .map_err(|e| data_err(&format!("machine {name:?}"), e))?;
            let path = write_distribution(&plan.out, name, &d)?;
            eprintln!(
                "generate {name} k={k}: {} tuples, total {} -> {}",
                d.entries().len(),
                d.total(),
                path.display()
            );
        }
    }
    Ok(())
}

/// `ingest`: distributions per (source, k) plus a manifest of every file
/// touched.
pub fn ingest(plan: &Plan) -> Result<(), CliError> {
    if plan.sources.is_empty() {
        return Err(CliError::Config("no [[sources]] configured".into()));
    }
    let mut manifest: Vec<ManifestEntry> = Vec::new();
    for source in &plan.sources {
        for (ki, &k) in plan.k.iter().enumerate() {
            // The manifest lists every file once per source, not once per k.
            let d = ingest_source(source, k, ki == 0, &mut manifest)?;
            let path = write_distribution(&plan.out, &source.name, &d)?;
            eprintln!(
                "ingest {} k={k}: total {} -> {}",
                source.name,
                d.total(),
                path.display()
            );
        }
    }
    let mut lines = String::new();
    for entry in &manifest {
        lines.push_str(&entry.to_json_line());
    }
    write_atomic(&plan.out.join("manifest.jsonl"), lines.as_bytes())?;
    Ok(())
}

fn file_size(path: &Path) -> u64 {
    std::fs::metadata(path).map(|m| m.len()).unwrap_or(0)
}

fn manifest_push(manifest: &mut Vec<ManifestEntry>, record: bool, path: &Path, status: &str) {
    if !record {
        return;
    }
    let digest = if status == "ok" {
        std::fs::read(path)
            .map(|b| sha256_hex(&b))
            .unwrap_or_default()
    } else {
        String::new()
    };
    manifest.push(ManifestEntry {
        path: path.display().to_string(),
        digest,
        size: file_size(path),
        status: status.to_string(),
    });
}

fn ingest_source(
    source: &SourcePlan,
    k: u8,
    record: bool,
    manifest: &mut Vec<ManifestEntry>,
) -> Result<TupleDistribution, CliError> {
    match source.kind {
        SourceKind::Fasta => {
            let d = ingest_fasta(&source.path, k, source.window)
                .map_err(|e| data_err(&format!("source {:?}", source.name), e))?;
            manifest_push(manifest, record, &source.path, "ok");
            Ok(d)
        }
        SourceKind::Files => ingest_many(source, k, manifest, record, |path, k| {
            ingest_file(path, k, source.window, source.max_bytes)
        }),
        SourceKind::Image => ingest_many(source, k, manifest, record, |path, k| {
            ingest_image(path, k, source.window)
        }),
    }
}

fn ingest_many(
    source: &SourcePlan,
    k: u8,
    manifest: &mut Vec<ManifestEntry>,
    record: bool,
    ingest_one: impl Fn(&Path, u8) -> algoprob::Result<TupleDistribution>,
) -> Result<TupleDistribution, CliError> {
    let paths = if source.path.is_dir() {
        list_files(&source.path, source.sample, source.seed)
            .map_err(|e| data_err(&format!("source {:?}", source.name), e))?
    } else {
        vec![source.path.clone()]
    };
    if paths.is_empty() {
        return Err(data_err(
            &format!("source {:?}", source.name),
            "no files found",
        ));
    }

    let mut merged: Option<TupleDistribution> = None;
    let mut digests = String::new();
    let mut ok_files = 0u64;
    for path in &paths {
        match ingest_one(path, k) {
            Ok(d) => {
                if let Some(s) = &d.meta().source {
                    digests.push_str(&s.digest);
                }
                ok_files += 1;
                manifest_push(manifest, record, path, "ok");
                merged = Some(match merged {
                    None => d,
                    Some(m) => m.merge(&d).map_err(|e| data_err("merge", e))?,
                });
            }
            Err(Error::OversizeFile { .. }) | Err(Error::OversizeImage { .. }) => {
                manifest_push(manifest, record, path, "skipped:size");
            }
            Err(Error::MalformedImage(_)) => {
                manifest_push(manifest, record, path, "skipped:undecodable");
            }
            Err(Error::Io { .. }) => {
                manifest_push(manifest, record, path, "skipped:unreadable");
            }
            Err(e) => return Err(data_err(&format!("source {:?}", source.name), e)),
        }
    }
    let mut merged = merged.ok_or_else(|| {
        data_err(
            &format!("source {:?}", source.name),
            "every file was skipped",
        )
    })?;

    if paths.len() > 1 {
        let mut parameters = BTreeMap::new();
        parameters.insert("files".into(), ok_files.to_string());
        parameters.insert("window".into(), source.window.to_string());
        if source.kind == SourceKind::Files {
            parameters.insert("max_bytes".into(), source.max_bytes.to_string());
        }
        if let Some(m) = source.sample {
            parameters.insert("sample".into(), m.to_string());
        }
        let class = merged.meta().class.clone();
        merged.set_meta(DistMeta {
            class,
            spec: None,
            seed: Some(source.seed),
            source: Some(SourceDescriptor {
                kind: "merged".into(),
                path: source.path.display().to_string(),
                parameters,
                digest: sha256_hex(digests.as_bytes()),
            }),
        });
    }
    Ok(merged)
}

/// Loads a distribution file and derives its display name from the file
/// stem (`TM.k4.json` -> `TM`).
fn load_named_distribution(path: &Path) -> Result<(String, TupleDistribution), CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| data_err(&path.display().to_string(), e))?;
    let d = TupleDistribution::from_json(&text)
        .map_err(|e| data_err(&path.display().to_string(), e))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match stem.rsplit_once(".k") {
        Some((base, suffix)) if suffix.chars().all(|c| c.is_ascii_digit()) => base.to_string(),
        _ => stem,
    };
    Ok((name, d))
}

/// `compare`: per-k correlation matrices plus rank-ordered and
/// lexicographic plot series for every input distribution.
pub fn compare(inputs: &[PathBuf], out: &Path, stats_opts: &StatsOptions) -> Result<(), CliError> {
    let mut by_k: BTreeMap<u8, Vec<(String, TupleDistribution)>> = BTreeMap::new();
    for path in inputs {
        let (name, d) = load_named_distribution(path)?;
        let bucket = by_k.entry(d.k()).or_default();
        if bucket.iter().any(|(n, _)| *n == name) {
            return Err(CliError::Config(format!(
                "duplicate distribution name {name:?} for k={}",
                d.k()
            )));
        }
        bucket.push((name, d));
    }
    if by_k.is_empty() {
        return Err(CliError::Config("no input distributions".into()));
    }

    for (&k, dists) in &mut by_k {
        if dists.len() < 2 {
            return Err(CliError::Data(format!(
                "k={k}: need at least 2 distributions, got {}",
                dists.len()
            )));
        }
        dists.sort_by(|a, b| a.0.cmp(&b.0));
        let named: Vec<(String, &TupleDistribution)> =
            dists.iter().map(|(n, d)| (n.clone(), d)).collect();
        let matrix = stats::correlation_matrix::<Scalar>(&named, stats_opts)
            .map_err(|e| data_err(&format!("matrix k={k}"), e))?;
        write_atomic(
            &out.join(format!("matrix.k{k}.csv")),
            matrix.to_csv().as_bytes(),
        )?;
        write_atomic(
            &out.join(format!("matrix.k{k}.json")),
            matrix.to_json().as_bytes(),
        )?;
        for (name, d) in dists.iter() {
            let rank_csv = stats::rank_series_csv::<Scalar>(d)
                .map_err(|e| data_err(&format!("{name} k={k}"), e))?;
            let lex_csv = stats::lex_series_csv::<Scalar>(d)
                .map_err(|e| data_err(&format!("{name} k={k}"), e))?;
            write_atomic(
                &out.join("plots").join(format!("{name}.k{k}.rank.csv")),
                rank_csv.as_bytes(),
            )?;
            write_atomic(
                &out.join("plots").join(format!("{name}.k{k}.lex.csv")),
                lex_csv.as_bytes(),
            )?;
        }
        eprintln!("compare k={k}: {} distributions", dists.len());
    }
    Ok(())
}

/// `score`: algorithmicity report of a data distribution against a
/// reference, with a complexity table for the data's top tuples.
pub fn score(
    data_path: &Path,
    reference_path: &Path,
    stats_opts: &StatsOptions,
    top: usize,
) -> Result<String, CliError> {
    let (data_name, data) = load_named_distribution(data_path)?;
    let (ref_name, reference) = load_named_distribution(reference_path)?;
    let report = stats::algorithmicity_score::<Scalar>(&data, &reference, stats_opts)
        .map_err(|e| data_err("score", e))?;

    let ranked = data.rank().map_err(|e| data_err("score", e))?;
    let table: Vec<serde_json::Value> = ranked
        .entries()
        .iter()
        .take(top)
        .map(|&(code, count)| {
            let label = algoprob::tuple_label(code, data.k());
            json!({
                "tuple": label,
                "count": count,
                "m_data": data.estimate_m::<Scalar>(code).ok().flatten(),
                "k_data": data.estimate_k::<Scalar>(code).ok().flatten(),
                "m_reference": reference.estimate_m::<Scalar>(code).ok().flatten(),
                "k_reference": reference.estimate_k::<Scalar>(code).ok().flatten(),
            })
        })
        .collect();

    let doc = json!({
        "format": "algoprob.score",
        "version": 1,
        "data": { "name": data_name, "meta": data.meta(), "total": data.total() },
        "reference": { "name": ref_name, "meta": reference.meta(), "total": reference.total() },
        "report": report,
        "top_tuples": table,
    });
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn load_codebook(
    reference: Option<&PathBuf>,
    codebook: Option<&PathBuf>,
) -> Result<CodeBook, CliError> {
    match (reference, codebook) {
        (Some(path), None) => {
            let (_, d) = load_named_distribution(path)?;
            build_codebook(&d).map_err(|e| data_err("codebook", e))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| data_err(&path.display().to_string(), e))?;
            CodeBook::from_json(&text).map_err(|e| data_err("codebook", e))
        }
        _ => Err(CliError::Config(
            "exactly one of --reference or --codebook is required".into(),
        )),
    }
}

/// `compress`: encode a file's bytes as k-blocks under the prior codebook.
pub fn compress(
    input: &Path,
    reference: Option<&PathBuf>,
    codebook_path: Option<&PathBuf>,
    out: &Path,
    save_codebook: Option<&PathBuf>,
) -> Result<String, CliError> {
    let book = load_codebook(reference, codebook_path)?;
    let bytes = std::fs::read(input).map_err(|e| data_err(&input.display().to_string(), e))?;
    let bits = algoprob::BitString::from_bytes_msb(&bytes);
    let payload = algoprob::priorcoder::encode(&bits, &book).map_err(|e| data_err("encode", e))?;
    write_atomic(out, &payload)?;
    if let Some(path) = save_codebook {
        write_atomic(path, book.to_json().as_bytes())?;
    }
    let report = compression_report::<Scalar>(&bits, &book).map_err(|e| data_err("report", e))?;
    let doc = json!({
        "format": "algoprob.compression-report",
        "version": 1,
        "input": input.display().to_string(),
        "payload": out.display().to_string(),
        "report": report,
    });
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// `decompress`: exact inverse of `compress`.
pub fn decompress(
    input: &Path,
    reference: Option<&PathBuf>,
    codebook_path: Option<&PathBuf>,
    out: &Path,
) -> Result<(), CliError> {
    let book = load_codebook(reference, codebook_path)?;
    let payload = std::fs::read(input).map_err(|e| data_err(&input.display().to_string(), e))?;
    let bits = algoprob::priorcoder::decode(&payload, &book).map_err(|e| data_err("decode", e))?;
    if bits.len() % 8 != 0 {
        return Err(CliError::Data(format!(
            "payload decodes to {} bits, not a whole number of bytes",
            bits.len()
        )));
    }
    write_atomic(out, &bits.to_bytes_msb())?;
    Ok(())
}

/// `report`: the full pipeline for one config: generate + ingest +
/// compare, with a summary of emitted artifacts.
pub fn report(plan: &Plan) -> Result<(), CliError> {
    if !plan.machines.is_empty() {
        generate(plan)?;
    }
    if !plan.sources.is_empty() {
        ingest(plan)?;
    }
    let names: Vec<&String> = plan
        .machines
        .iter()
        .map(|(n, _)| n)
        .chain(plan.sources.iter().map(|s| &s.name))
        .collect();
    if names.len() >= 2 {
        let inputs: Vec<PathBuf> = names
            .iter()
            .flat_map(|n| plan.k.iter().map(move |&k| dist_paths(&plan.out, n, k).0))
            .collect();
        compare(&inputs, &plan.out, &plan.stats)?;
    }
    let doc = json!({
        "format": "algoprob.report",
        "version": 1,
        "k": plan.k,
        "distributions": names,
        "tie_policy": plan.stats.tie_policy,
        "permutations": plan.stats.permutations,
        "seed": plan.stats.seed,
    });
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    write_atomic(&plan.out.join("report.json"), text.as_bytes())?;
    Ok(())
}
