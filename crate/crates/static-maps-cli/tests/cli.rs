//! End-to-end tests of the `static-maps` binary: exit codes, diagnostics,
//! dump determinism, and that emitted source actually compiles and
//! answers lookups.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_static-maps"))
}

fn write_codons_tsv(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("codons.tsv");
    fs::write(&path, static_maps_cli::datasets::CODONS_TSV).unwrap();
    path
}

#[test]
fn gen_blob_is_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_codons_tsv(dir.path());
    let out_a = dir.path().join("a.bin");
    let out_b = dir.path().join("b.bin");
    for out in [&out_a, &out_b] {
        let status = bin()
            .args(["gen", "--input"])
            .arg(&input)
            .args(["--value-kind", "char", "--emit", "blob", "--seed", "424242", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(&out_a).unwrap();
    let b = fs::read(&out_b).unwrap();
    assert_eq!(a, b, "same seed produced different blobs");

    // And the blob loads back into a working table.
    let table = static_maps_cli::load_table(&a).unwrap();
    assert_eq!(table.len(), 64);
    assert_eq!(table.lookup_text("ATG").unwrap(), "M");
    assert_eq!(table.lookup_text("TAA").unwrap(), "*");
}

#[test]
fn env_seed_is_used_when_no_flag_is_given() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_codons_tsv(dir.path());
    let out_a = dir.path().join("a.bin");
    let out_b = dir.path().join("b.bin");
    for out in [&out_a, &out_b] {
        let status = bin()
            .env("STATIC_MAPS_SEED", "777")
            .args(["gen", "--input"])
            .arg(&input)
            .args(["--value-kind", "char", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn duplicate_key_exits_1_and_names_both_lines() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("dup.tsv");
    fs::write(&input, "H\t1.008\nHe\t4.002602\nH\t9.9\n").unwrap();
    let output = bin()
        .args(["gen", "--input"])
        .arg(&input)
        .args(["--value-kind", "float64", "--out"])
        .arg(dir.path().join("x.bin"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("duplicate key"), "stderr: {stderr}");
    assert!(stderr.contains('1') && stderr.contains('3'), "stderr: {stderr}");
}

#[test]
fn unreadable_input_exits_1() {
    let output = bin()
        .args(["gen", "--input", "/nonexistent/nope.tsv", "--out", "/tmp/unused.bin"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn forced_width_collision_exits_2_and_names_keys() {
    let dir = tempfile::tempdir().unwrap();
    // 300 keys cannot fit 8-bit truncations.
    let mut tsv = String::new();
    for i in 0..300 {
        tsv.push_str(&format!("key-{i}\t{i}\n"));
    }
    let input = dir.path().join("wide.tsv");
    fs::write(&input, tsv).unwrap();
    let output = bin()
        .args(["gen", "--input"])
        .arg(&input)
        .args(["--value-kind", "int64", "--width", "8", "--out"])
        .arg(dir.path().join("x.bin"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("collide"), "stderr: {stderr}");
    assert!(stderr.contains("key-"), "stderr should name colliding keys: {stderr}");
}

#[test]
fn empty_keyset_is_rejected_at_construction() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.tsv");
    fs::write(&input, "").unwrap();
    let output = bin()
        .args(["gen", "--input"])
        .arg(&input)
        .args(["--out"])
        .arg(dir.path().join("x.bin"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn emitted_source_compiles_and_answers_lookups() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_codons_tsv(dir.path());
    let generated = dir.path().join("codon_table.rs");
    let status = bin()
        .args(["gen", "--input"])
        .arg(&input)
        .args(["--value-kind", "char", "--emit", "source", "--seed", "5", "--out"])
        .arg(&generated)
        .status()
        .unwrap();
    assert!(status.success());

    let main_rs = dir.path().join("main.rs");
    fs::write(
        &main_rs,
        r#"mod codon_table;

fn main() {
    assert_eq!(codon_table::get("ATG"), Some('M'));
    assert_eq!(codon_table::get("TGG"), Some('W'));
    assert_eq!(codon_table::get("TAA"), Some('*'));
    assert_eq!(codon_table::get("XYZ"), None);
    assert_eq!(codon_table::get(""), None);
    assert_eq!(codon_table::entries().count(), codon_table::N);
    for (k, v) in codon_table::entries() {
        assert_eq!(codon_table::get(k), Some(v));
    }
    println!("generated table ok");
}
"#,
    )
    .unwrap();

    let exe = dir.path().join("codon_check");
    let rustc = Command::new("rustc")
        .args(["--edition", "2021", "-O", "-o"])
        .arg(&exe)
        .arg(&main_rs)
        .output()
        .unwrap();
    assert!(
        rustc.status.success(),
        "generated source failed to compile:\n{}",
        String::from_utf8_lossy(&rustc.stderr)
    );
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success());
    assert!(String::from_utf8_lossy(&run.stdout).contains("generated table ok"));
}

#[test]
fn bench_subcommand_prints_csv() {
    let output = bin()
        .args([
            "bench",
            "--demo",
            "codons",
            "--impl",
            "all",
            "--workload-seed",
            "9",
            "--lookups",
            "40000",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8_lossy(&output.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "demo,impl,operation,iterations,median_ns,p99_ns,checksum");
    assert_eq!(lines.len(), 1 + 4, "one row per implementation");
    // All four implementations; identical checksum column.
    let checksums: Vec<&str> =
        lines[1..].iter().map(|l| l.rsplit(',').next().unwrap()).collect();
    assert!(checksums.windows(2).all(|w| w[0] == w[1]), "checksums differ: {stdout}");
}
