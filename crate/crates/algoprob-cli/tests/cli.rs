//! Black-box tests of the binary: exit codes, manifest statuses, the
//! compress/decompress round trip and the score report.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn algoprob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algoprob"))
        .args(args)
        .output()
        .expect("spawn algoprob")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.toml");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "nonsense = true\n");
    let out = algoprob(&["generate", "--config", &cfg]);
    assert_exit(&out, 2);

    let missing = algoprob(&["generate", "--config", "/nonexistent.toml"]);
    assert_exit(&missing, 2);

    // Duplicate names are a config error.
    let cfg = write_config(
        dir.path(),
        "[[machines]]\nname = \"X\"\nclass = \"tm\"\n[[machines]]\nname = \"X\"\nclass = \"ca\"\n",
    );
    let out = algoprob(&["generate", "--config", &cfg]);
    assert_exit(&out, 2);
}

#[test]
fn sample_too_large_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k = [4]\n[[machines]]\nname = \"CA\"\nclass = \"ca\"\nmode = \"sample\"\nsample_size = 70000\nseed = 1\n",
    );
    let out_dir = dir.path().join("out");
    let out = algoprob(&[
        "generate",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_exit(&out, 3);
}

#[test]
fn ingest_directory_writes_merged_distribution_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    fs::write(corpus.join("a.bin"), [0xAAu8; 64]).unwrap();
    fs::write(corpus.join("b.bin"), [0x0Fu8; 64]).unwrap();
    fs::write(corpus.join("c.bin"), b"small text file").unwrap();
    fs::write(corpus.join("huge.bin"), vec![1u8; 4096]).unwrap();

    let cfg = write_config(
        dir.path(),
        &format!(
            "k = [4]\n[[sources]]\nname = \"HD\"\nkind = \"files\"\npath = {:?}\nmax_bytes = 1024\n",
            corpus.display()
        ),
    );
    let out_dir = dir.path().join("out");
    let out = algoprob(&[
        "ingest",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_exit(&out, 0);

    let manifest = fs::read_to_string(out_dir.join("manifest.jsonl")).unwrap();
    let lines: Vec<&str> = manifest.lines().collect();
    assert_eq!(lines.len(), 4);
    let oversize: Vec<&str> = lines
        .iter()
        .filter(|l| l.contains("skipped:size"))
        .copied()
        .collect();
    assert_eq!(oversize.len(), 1);
    assert!(oversize[0].contains("huge.bin"));
    assert_eq!(lines.iter().filter(|l| l.contains("\"ok\"")).count(), 3);

    let dist = fs::read_to_string(out_dir.join("HD.k4.json")).unwrap();
    let parsed = algoprob::TupleDistribution::from_json(&dist).unwrap();
    // 3 files of 64+64+15 bytes, sliding windows per file.
    assert_eq!(parsed.total(), (64 * 8 - 3) + (64 * 8 - 3) + (15 * 8 - 3));
    assert_eq!(
        parsed.meta().source.as_ref().unwrap().kind,
        "merged".to_string()
    );
}

#[test]
fn compress_decompress_round_trip_via_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k = [4]\n[[machines]]\nname = \"CA\"\nclass = \"ca\"\nmode = \"sample\"\nsample_size = 200\nseed = 5\n",
    );
    let out_dir = dir.path().join("out");
    assert_exit(
        &algoprob(&[
            "generate",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ]),
        0,
    );
    let reference = out_dir.join("CA.k4.json");

    let input = dir.path().join("input.bin");
    fs::write(
        &input,
        (0u32..2000)
            .map(|i| (i * 37 % 251) as u8)
            .collect::<Vec<u8>>(),
    )
    .unwrap();
    let payload = dir.path().join("input.apc");
    let codebook = dir.path().join("book.json");
    let out = algoprob(&[
        "compress",
        "--input",
        input.to_str().unwrap(),
        "--reference",
        reference.to_str().unwrap(),
        "--out",
        payload.to_str().unwrap(),
        "--save-codebook",
        codebook.to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("compress prints a JSON report");
    assert_eq!(report["report"]["input_bits"], 16000);
    assert!(report["report"]["bits_per_block"].as_f64().unwrap() > 0.0);

    let restored = dir.path().join("restored.bin");
    assert_exit(
        &algoprob(&[
            "decompress",
            "--input",
            payload.to_str().unwrap(),
            "--codebook",
            codebook.to_str().unwrap(),
            "--out",
            restored.to_str().unwrap(),
        ]),
        0,
    );
    assert_eq!(fs::read(&input).unwrap(), fs::read(&restored).unwrap());

    // Mismatched codebook: hard error, no output written.
    let cfg2 = write_config(
        dir.path(),
        "k = [4]\n[[machines]]\nname = \"TS\"\nclass = \"ts\"\nmode = \"sample\"\nsample_size = 200\nseed = 9\n",
    );
    assert_exit(
        &algoprob(&[
            "generate",
            "--config",
            &cfg2,
            "--out",
            out_dir.to_str().unwrap(),
        ]),
        0,
    );
    let wrong_ref = out_dir.join("TS.k4.json");
    let never = dir.path().join("never.bin");
    let out = algoprob(&[
        "decompress",
        "--input",
        payload.to_str().unwrap(),
        "--reference",
        wrong_ref.to_str().unwrap(),
        "--out",
        never.to_str().unwrap(),
    ]);
    assert_exit(&out, 3);
    assert!(!never.exists(), "failed decompress must not write output");
}

#[test]
fn score_reports_zero_distance_to_itself() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k = [4]\n[[machines]]\nname = \"TM\"\nclass = \"tm\"\nmode = \"sample\"\nsample_size = 150\nseed = 4\n",
    );
    let out_dir = dir.path().join("out");
    assert_exit(
        &algoprob(&[
            "generate",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ]),
        0,
    );
    let dist = out_dir.join("TM.k4.json");
    let out = algoprob(&[
        "score",
        "--data",
        dist.to_str().unwrap(),
        "--reference",
        dist.to_str().unwrap(),
        "--permutations",
        "500",
        "--top",
        "4",
    ]);
    assert_exit(&out, 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["tv_reference"], 0.0);
    assert_eq!(doc["report"]["correlation"]["rho"], 1.0);
    assert_eq!(doc["report"]["more_algorithmic"], true);
    assert_eq!(doc["top_tuples"].as_array().unwrap().len(), 4);
    // Provenance echoed: the sampling spec and seed of both sides.
    assert_eq!(doc["data"]["meta"]["spec"]["seed"], 4);
    assert_eq!(doc["reference"]["meta"]["seed"], 4);

    // Mismatched k is a data error.
    let cfg2 = write_config(
        dir.path(),
        "k = [5]\n[[machines]]\nname = \"TM5\"\nclass = \"tm\"\nmode = \"sample\"\nsample_size = 150\nseed = 4\n",
    );
    assert_exit(
        &algoprob(&[
            "generate",
            "--config",
            &cfg2,
            "--out",
            out_dir.to_str().unwrap(),
        ]),
        0,
    );
    let out = algoprob(&[
        "score",
        "--data",
        dist.to_str().unwrap(),
        "--reference",
        out_dir.join("TM5.k5.json").to_str().unwrap(),
    ]);
    assert_exit(&out, 3);
}

#[test]
fn compare_requires_two_distributions_per_k() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k = [4]\n[[machines]]\nname = \"TM\"\nclass = \"tm\"\nmode = \"sample\"\nsample_size = 100\nseed = 4\n",
    );
    let out_dir = dir.path().join("out");
    assert_exit(
        &algoprob(&[
            "generate",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ]),
        0,
    );
    let dist = out_dir.join("TM.k4.json");
    let out = algoprob(&[
        "compare",
        "--inputs",
        dist.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_exit(&out, 3);
}
