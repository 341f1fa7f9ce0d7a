//! End-to-end runs of the binary: flags, file outputs, manifests,
//! determinism, and error paths.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::filler_text;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_switchcode"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("failed to launch binary")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_writes_bytes_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "gen", "--kind", "iid", "--d", "4", "--n", "1000", "--seed", "7", "--out", "s.bin",
        ],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let data = std::fs::read(dir.path().join("s.bin")).unwrap();
    assert_eq!(data.len(), 1000);
    assert!(data.iter().all(|&b| b < 4));
    let manifest = std::fs::read_to_string(dir.path().join("s.bin.manifest")).unwrap();
    assert!(manifest.contains("command = gen\n"));
    assert!(manifest.contains("seed = 7\n"));
    assert!(manifest.contains("entropy_rate_bits = 2\n"));

    // same seed, same bytes
    let out2 = run_in(
        dir.path(),
        &[
            "gen", "--kind", "iid", "--d", "4", "--n", "1000", "--seed", "7", "--out", "s2.bin",
        ],
    );
    assert!(out2.status.success());
    assert_eq!(data, std::fs::read(dir.path().join("s2.bin")).unwrap());
}

#[test]
fn gen_markov_needs_transition() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["gen", "--kind", "markov", "--n", "10", "--out", "m.bin"],
    );
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("--transition"));
    let out = run_in(
        dir.path(),
        &[
            "gen",
            "--kind",
            "markov",
            "--transition",
            "0.9,0.1;0.2,0.8",
            "--n",
            "64",
            "--seed",
            "3",
            "--out",
            "m.bin",
        ],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert_eq!(std::fs::read(dir.path().join("m.bin")).unwrap().len(), 64);
}

#[test]
fn rate_lz_small_series() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.txt"), b"abracadabra").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "rate", "--model", "lz", "--input", "in.txt", "--max-n", "4", "--out", "r.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,model,bits,rate_bpc");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,lz,"));
    assert!(lines[2].starts_with("4,lz,"));
}

#[test]
fn rate_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.txt"), filler_text(4096)).unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = run_in(
            dir.path(),
            &[
                "rate", "--model", "plain", "--input", "in.txt", "--out", name,
            ],
        );
        assert!(out.status.success(), "{}", stderr_of(&out));
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let manifest = std::fs::read_to_string(dir.path().join("a.csv.manifest")).unwrap();
    assert!(manifest.contains("command = rate\n"));
    assert!(manifest.contains("model = plain\n"));
    assert!(manifest.contains("alpha = 1.001\n"));
    assert!(manifest.contains("depth = 7\n"));
    assert!(manifest.contains("input.sha256 = "));
}

#[test]
fn default_output_filename_is_command_model() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.txt"), b"mississippi mississippi").unwrap();
    let out = run_in(dir.path(), &["rate", "--model", "lz", "--input", "in.txt"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(dir.path().join("rate_lz.csv").exists());
    assert!(dir.path().join("rate_lz.csv.manifest").exists());
}

#[test]
fn mi_fixed_requires_training() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("x.txt"), b"some input text").unwrap();
    let out = run_in(dir.path(), &["mi", "--model", "fixed", "--input", "x.txt"]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("--train"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["rate", "--nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn depth_reports_witness() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("z.txt"), b"abab").unwrap();
    let out = run_in(dir.path(), &["depth", "--input", "z.txt"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("depth: 2"), "{text}");
    assert!(text.contains("witness_offset: 0"), "{text}");
}

#[test]
fn depth_auto_and_order_mass_run() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.txt"), filler_text(2000)).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "rate",
            "--model",
            "plain",
            "--input",
            "in.txt",
            "--depth",
            "auto",
            "--max-n",
            "1024",
            "--order-mass",
            "--out",
            "r.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let err = stderr_of(&out);
    assert!(err.contains("order -1:"), "{err}");
    let manifest = std::fs::read_to_string(dir.path().join("r.csv.manifest")).unwrap();
    assert!(manifest.contains("depth_arg = auto\n"));
}

#[test]
fn preadapted_with_cache_reuses_counts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("train.txt"), filler_text(3000)).unwrap();
    std::fs::write(dir.path().join("in.txt"), filler_text(1200)).unwrap();
    let args = [
        "rate",
        "--model",
        "preadapted",
        "--input",
        "in.txt",
        "--train",
        "train.txt",
        "--train-cache",
        "cache.bin",
        "--max-n",
        "1024",
        "--out",
        "r.csv",
    ];
    let out1 = run_in(dir.path(), &args);
    assert!(out1.status.success(), "{}", stderr_of(&out1));
    assert!(stderr_of(&out1).contains("cached trained counts"));
    let csv1 = std::fs::read(dir.path().join("r.csv")).unwrap();
    let out2 = run_in(dir.path(), &args);
    assert!(out2.status.success());
    assert!(stderr_of(&out2).contains("reusing trained counts"));
    assert_eq!(csv1, std::fs::read(dir.path().join("r.csv")).unwrap());
}

#[test]
fn gamma_fits_the_mi_series() {
    let dir = tempfile::tempdir().unwrap();
    // strongly structured input so block halves share plenty of phrases
    std::fs::write(dir.path().join("in.txt"), filler_text(8192)).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "gamma",
            "--model",
            "plain",
            "--input",
            "in.txt",
            "--fit-range",
            "64:8192",
            "--out",
            "g.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("gamma = "), "{}", stdout_of(&out));
    let csv = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "model,c,gamma,residual,n_min,n_max");
    assert!(lines[1].starts_with("plain,"));
    let manifest = std::fs::read_to_string(dir.path().join("g.csv.manifest")).unwrap();
    assert!(manifest.contains("fit_range = 64:8192\n"));
}

#[test]
fn filter27_restricts_the_alphabet() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.txt"), filler_text(600)).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "rate",
            "--model",
            "plain",
            "--input",
            "in.txt",
            "--filter27",
            "--max-n",
            "256",
            "--out",
            "f.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let manifest = std::fs::read_to_string(dir.path().join("f.csv.manifest")).unwrap();
    assert!(manifest.contains("d = 27\n"));
}

#[test]
fn lz_subcommand_summarizes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.txt"), b"x").unwrap();
    let out = run_in(dir.path(), &["lz", "--input", "in.txt"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("phrases: 1"), "{text}");
    assert!(text.contains("bits: 8"), "{text}");
}

#[test]
fn max_n_beyond_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.txt"), b"short").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "rate", "--model", "plain", "--input", "in.txt", "--max-n", "64", "--out", "r.csv",
        ],
    );
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("corpus too short"));
}
