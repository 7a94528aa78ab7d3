//! End-to-end tests of the binary: subcommands, exit codes, output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_imbalance-bench"))
}

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .canonicalize()
        .unwrap()
}

fn write_config(dir: &Path, out_dir: &Path) -> PathBuf {
    let path = dir.join("bench.conf");
    fs::write(
        &path,
        format!(
            "corpus = {}\n\
             embeddings = {}\n\
             out_dir = {}\n\
             seed = 13\n\
             methods = none, random, smote\n\
             representations = bow\n\
             classifiers = knn\n\
             k_percents = 0.5, 1.0\n",
            core_fixture("corpus.tsv").display(),
            core_fixture("embeddings.txt").display(),
            out_dir.display(),
        ),
    )
    .unwrap();
    path
}

fn run_ok(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn run_writes_csv_and_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let config = write_config(dir.path(), &out_dir);

    let output = bin().args(["run", "--config"]).arg(&config).output().unwrap();
    run_ok(&output);

    let csv = fs::read_to_string(out_dir.join("cells.csv")).unwrap();
    assert!(csv.starts_with(
        "method,representation,classifier,k_percent,accuracy,macro_f1,macro_precision,macro_recall,seed,wall_time_ms"
    ));
    // 1 rep * 1 clf * (1 + 2 methods * 2 ks) = 5 cells.
    assert_eq!(csv.lines().count(), 6);

    let md = fs::read_to_string(out_dir.join("report.md")).unwrap();
    assert!(md.contains("## k = 50%"));
    assert!(md.contains("## k = 100%"));
}

#[test]
fn identical_runs_are_byte_identical_and_seed_override_changes_them() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let out_c = dir.path().join("c");
    let config = write_config(dir.path(), Path::new("unused"));

    for out in [&out_a, &out_b] {
        let output = bin()
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        run_ok(&output);
    }
    let bytes_a = fs::read(out_a.join("cells.csv")).unwrap();
    let bytes_b = fs::read(out_b.join("cells.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b);

    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_c)
        .args(["--seed", "99"])
        .output()
        .unwrap();
    run_ok(&output);
    let bytes_c = fs::read(out_c.join("cells.csv")).unwrap();
    assert_ne!(bytes_a, bytes_c);
}

#[test]
fn config_errors_exit_with_code_1() {
    let dir = tempfile::tempdir().unwrap();

    // Missing config file.
    let output = bin()
        .args(["run", "--config", "/nonexistent/bench.conf"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));

    // Unknown key.
    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "corups = x.tsv\n").unwrap();
    let output = bin().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(output.status.code(), Some(1));

    // Valid syntax, missing corpus file.
    let missing = dir.path().join("missing.conf");
    fs::write(&missing, "corpus = /nonexistent/corpus.tsv\n").unwrap();
    let output = bin().args(["run", "--config"]).arg(&missing).output().unwrap();
    assert_eq!(output.status.code(), Some(1));

    // Bad CLI usage.
    let output = bin().args(["run", "--no-such-flag"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    // The corpus exists (so config validation passes) but is malformed, so
    // the failure happens at run time.
    let corpus = dir.path().join("broken.tsv");
    fs::write(&corpus, "NoTabHere\n").unwrap();
    let config = dir.path().join("bench.conf");
    fs::write(
        &config,
        format!(
            "corpus = {}\nrepresentations = bow\nclassifiers = knn\nmethods = none\n",
            corpus.display()
        ),
    )
    .unwrap();
    let output = bin().args(["run", "--config"]).arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn synth_writes_matrix_csv_and_corpus_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("blobs.spec");
    fs::write(
        &spec,
        "dimension = 2\nstd = 0.5\nseed = 7\nclass = A, 8, 0.0, 0.0\nclass = B, 4, 3.0, 3.0\n",
    )
    .unwrap();

    let csv_out = dir.path().join("blobs.csv");
    let output = bin()
        .args(["synth", "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(&csv_out)
        .output()
        .unwrap();
    run_ok(&output);
    let csv = fs::read_to_string(&csv_out).unwrap();
    assert_eq!(csv.lines().count(), 12);
    assert!(csv.lines().next().unwrap().starts_with("A,"));

    let tsv_out = dir.path().join("blobs.tsv");
    let output = bin()
        .args(["synth", "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(&tsv_out)
        .output()
        .unwrap();
    run_ok(&output);
    let tsv = fs::read_to_string(&tsv_out).unwrap();
    assert_eq!(tsv.lines().count(), 12);
    assert!(tsv.lines().next().unwrap().contains('\t'));
}

#[test]
fn report_rerenders_cells_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let config = write_config(dir.path(), &out_dir);
    run_ok(&bin().args(["run", "--config"]).arg(&config).output().unwrap());

    let output = bin()
        .args(["report", "--cells"])
        .arg(out_dir.join("cells.csv"))
        .args(["--format", "markdown"])
        .output()
        .unwrap();
    run_ok(&output);
    let md = String::from_utf8_lossy(&output.stdout);
    assert!(md.contains("# Oversampling benchmark results"));
    assert!(md.contains("## k = 50%"));

    let output = bin()
        .args(["report", "--cells", "/nonexistent/cells.csv"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}
