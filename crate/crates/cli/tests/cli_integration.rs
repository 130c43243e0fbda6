//! End-to-end tests that drive the compiled `subseg` binary: exit codes,
//! file outputs, config/flag precedence, format handling, and determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_subseg")
}

/// Runs the binary with `args` in `dir`, with a scrubbed thread environment
/// plus any extra variables.
fn run_in(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args).current_dir(dir).env_remove("SUBSEG_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

const CLEAN_SPEC: &str = "\
k = 3
subspace_dim = 3
ambient_dim = 30
points_per_subspace = 12
noise_variance_factor = 0.0
outlier_fraction = 0.0
outlier_variance_factor = 1.0
seed = 42
";

fn write_spec(dir: &Path) -> PathBuf {
    let path = dir.join("spec.toml");
    fs::write(&path, CLEAN_SPEC).unwrap();
    path
}

fn generate_dataset(dir: &Path) -> PathBuf {
    write_spec(dir);
    let out = run_in(
        dir,
        &["generate", "--config", "spec.toml", "--output-dir", "data"],
        &[],
    );
    assert_eq!(code(&out), 0, "generate failed: {}", stderr(&out));
    dir.join("data")
}

#[test]
fn generate_writes_all_three_files_and_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_spec(dir);
    for sub in ["a", "b"] {
        let out = run_in(
            dir,
            &["generate", "--config", "spec.toml", "--output-dir", sub],
            &[],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    for name in ["X.csv", "labels.csv", "outliers.csv"] {
        let a = fs::read(dir.join("a").join(name)).unwrap();
        let b = fs::read(dir.join("b").join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    // A different seed must change the data.
    let out = run_in(
        dir,
        &[
            "generate",
            "--config",
            "spec.toml",
            "--seed",
            "43",
            "--output-dir",
            "c",
        ],
        &[],
    );
    assert_eq!(code(&out), 0);
    assert_ne!(
        fs::read(dir.join("a/X.csv")).unwrap(),
        fs::read(dir.join("c/X.csv")).unwrap()
    );

    // 30 rows in X, 36 label lines, 36 indicator lines all zero.
    let x = fs::read_to_string(dir.join("a/X.csv")).unwrap();
    assert_eq!(x.lines().count(), 30);
    assert_eq!(x.lines().next().unwrap().split(',').count(), 36);
    let labels = fs::read_to_string(dir.join("a/labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 36);
    let outliers = fs::read_to_string(dir.join("a/outliers.csv")).unwrap();
    assert!(outliers.lines().all(|l| l == "0"));
}

#[test]
fn cluster_scores_perfectly_on_clean_data_and_writes_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate_dataset(dir);
    let out = run_in(
        dir,
        &[
            "cluster",
            "--input",
            "data/X.csv",
            "--truth",
            "data/labels.csv",
            "--method",
            "rsi",
            "--lambda",
            "0.6",
            "--output-dir",
            "run",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("accuracy   = 1.000000"),
        "unexpected report: {text}"
    );
    assert!(text.contains("converged  = true"));

    let report = fs::read_to_string(dir.join("run/report.toml")).unwrap();
    let parsed: toml::Value = report.parse().unwrap();
    assert_eq!(parsed["method"].as_str(), Some("rsi"));
    assert_eq!(parsed["accuracy"].as_float(), Some(1.0));
    assert_eq!(parsed["clusters"].as_integer(), Some(3));
    assert_eq!(parsed["converged"].as_bool(), Some(true));

    let labels = fs::read_to_string(dir.join("run/labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 36);
    assert!(labels.lines().all(|l| l.parse::<usize>().unwrap() < 3));
}

#[test]
fn cluster_works_without_truth_when_k_is_given() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate_dataset(dir);
    let out = run_in(
        dir,
        &[
            "cluster",
            "--input",
            "data/X.csv",
            "--method",
            "lrr",
            "--lambda",
            "0.12",
            "--k",
            "3",
            "--output-dir",
            "run",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(
        !stdout(&out).contains("accuracy"),
        "no truth, so no accuracy line"
    );
    // Without truth and without --k the command must fail validation.
    let out = run_in(
        dir,
        &[
            "cluster",
            "--input",
            "data/X.csv",
            "--method",
            "lrr",
            "--lambda",
            "0.12",
        ],
        &[],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--k"));
}

#[test]
fn cluster_accepts_a_sequence_directory_and_infers_k_from_its_labels() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate_dataset(dir);
    let out = run_in(
        dir,
        &[
            "cluster",
            "--input",
            "data",
            "--method",
            "rsi",
            "--lambda",
            "0.6",
            "--output-dir",
            "run",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("clusters   = 3"),
        "k should come from data/labels.csv: {text}"
    );
    assert!(text.contains("accuracy   = 1.000000"));
}

#[test]
fn sequence_directory_with_missing_labels_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate_dataset(dir);
    fs::remove_file(dir.join("data/labels.csv")).unwrap();
    let out = run_in(
        dir,
        &[
            "cluster", "--input", "data", "--method", "rsi", "--lambda", "0.6",
        ],
        &[],
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn sequence_directory_with_wrong_label_count_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate_dataset(dir);
    fs::write(dir.join("data/labels.csv"), "0\n1\n2\n").unwrap();
    let out = run_in(
        dir,
        &[
            "cluster", "--input", "data", "--method", "rsi", "--lambda", "0.6",
        ],
        &[],
    );
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("labels for"));
}

#[test]
fn matrix_market_array_and_coordinate_inputs_are_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    // Rank-1 3x4 matrix in array (column-major) layout.
    fs::write(
        dir.join("X.mtx"),
        "%%MatrixMarket matrix array real general\n3 4\n1\n2\n3\n2\n4\n6\n3\n6\n9\n4\n8\n12\n",
    )
    .unwrap();
    let out = run_in(
        dir,
        &[
            "denoise",
            "--input",
            "X.mtx",
            "--method",
            "rsi",
            "--lambda",
            "10",
            "--output-dir",
            "d",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let corrected = fs::read_to_string(dir.join("d/corrected.csv")).unwrap();
    assert_eq!(corrected.lines().count(), 3);
    assert_eq!(corrected.lines().next().unwrap().split(',').count(), 4);

    fs::write(
        dir.join("C.mtx"),
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 5.0\n2 2 -3.0\n",
    )
    .unwrap();
    let out = run_in(
        dir,
        &[
            "denoise",
            "--input",
            "C.mtx",
            "--method",
            "rsi",
            "--lambda",
            "10",
            "--output-dir",
            "c",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn flags_override_config_file_values() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate_dataset(dir);
    fs::write(
        dir.join("run.toml"),
        "method = \"lrr\"\nlambda = 0.12\nk = 3\ninput = \"data/X.csv\"\noutput_dir = \"from_file\"\n",
    )
    .unwrap();
    // Flag --method rsi must beat the file's lrr; file supplies the rest.
    let out = run_in(
        dir,
        &[
            "cluster", "--config", "run.toml", "--method", "rsi", "--lambda", "0.6",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = fs::read_to_string(dir.join("from_file/report.toml")).unwrap();
    assert!(
        report.contains("method = \"rsi\""),
        "flag should override file: {report}"
    );
}

#[test]
fn config_files_with_unknown_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate_dataset(dir);
    fs::write(dir.join("run.toml"), "methodd = \"lrr\"\n").unwrap();
    let out = run_in(
        dir,
        &[
            "cluster",
            "--config",
            "run.toml",
            "--input",
            "data/X.csv",
            "--lambda",
            "0.6",
            "--k",
            "3",
        ],
        &[],
    );
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("methodd"));
}

#[test]
fn exit_codes_match_the_documented_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_spec(dir);

    // Missing data file: I/O.
    let out = run_in(
        dir,
        &[
            "cluster",
            "--input",
            "absent.csv",
            "--method",
            "rsi",
            "--lambda",
            "0.6",
            "--k",
            "2",
        ],
        &[],
    );
    assert_eq!(code(&out), 3);

    // Missing config file: I/O.
    let out = run_in(dir, &["generate", "--config", "absent.toml"], &[]);
    assert_eq!(code(&out), 3);

    // Unknown method: validation.
    fs::write(dir.join("one.csv"), "1,2\n2,4\n").unwrap();
    let out = run_in(
        dir,
        &[
            "cluster", "--input", "one.csv", "--method", "x", "--lambda", "0.6", "--k", "1",
        ],
        &[],
    );
    assert_eq!(code(&out), 2);

    // Malformed matrix: validation.
    fs::write(dir.join("ragged.csv"), "1,2\n3\n").unwrap();
    let out = run_in(
        dir,
        &[
            "cluster",
            "--input",
            "ragged.csv",
            "--method",
            "rsi",
            "--lambda",
            "0.6",
            "--k",
            "1",
        ],
        &[],
    );
    assert_eq!(code(&out), 2);

    // Non-finite entries: validation.
    fs::write(dir.join("nan.csv"), "1,NaN\n2,4\n").unwrap();
    let out = run_in(
        dir,
        &[
            "cluster", "--input", "nan.csv", "--method", "rsi", "--lambda", "0.6", "--k", "1",
        ],
        &[],
    );
    assert_eq!(code(&out), 2);

    // Invalid generator parameters (subspaces exceed the ambient space).
    fs::write(
        dir.join("bad_spec.toml"),
        "k = 10\nsubspace_dim = 10\nambient_dim = 5\n",
    )
    .unwrap();
    let out = run_in(dir, &["generate", "--config", "bad_spec.toml"], &[]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    // Unknown flag: clap reports usage errors as 2.
    let out = run_in(dir, &["generate", "--config", "spec.toml", "--bogus"], &[]);
    assert_eq!(code(&out), 2);

    // Bad thread cap: validation, regardless of subcommand.
    let out = run_in(
        dir,
        &["generate", "--config", "spec.toml"],
        &[("SUBSEG_THREADS", "many")],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("SUBSEG_THREADS"));

    // Thread cap 0 and unset both mean auto and must succeed.
    let out = run_in(
        dir,
        &["generate", "--config", "spec.toml"],
        &[("SUBSEG_THREADS", "0")],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn verify_passes_on_clean_spec_and_reports_informationally_on_noisy_spec() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_spec(dir);
    let out = run_in(dir, &["verify", "--config", "spec.toml"], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    for needle in [
        "sim_gap",
        "nuclear_gap",
        "feasibility",
        "block_off_diagonal_max",
        "block_rank[2]",
    ] {
        assert!(text.contains(needle), "missing {needle} in: {text}");
    }
    assert!(text.contains("overall: PASS"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");

    let noisy = CLEAN_SPEC.replace("noise_variance_factor = 0.0", "noise_variance_factor = 0.1");
    fs::write(dir.join("noisy.toml"), noisy).unwrap();
    let out = run_in(dir, &["verify", "--config", "noisy.toml"], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("overall: INFO"), "{text}");
    assert!(
        !text.contains("PASS") && !text.contains("FAIL"),
        "nothing graded: {text}"
    );
}

#[test]
fn verify_on_a_matrix_file_without_truth_skips_block_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate_dataset(dir);
    let out = run_in(dir, &["verify", "--input", "data/X.csv"], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("overall: PASS"), "{text}");
    assert!(
        !text.contains("block_rank"),
        "no truth, no block checks: {text}"
    );

    let out = run_in(
        dir,
        &[
            "verify",
            "--input",
            "data/X.csv",
            "--truth",
            "data/labels.csv",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("block_rank[2]"));
}

const SWEEP_CONFIG: &str = "\
fractions = [0.0, 0.3]
trials = 2
lambda_lrr = 0.12
lambda_rsi = 0.6
seed = 7

[spec]
k = 3
subspace_dim = 3
ambient_dim = 30
points_per_subspace = 12
noise_variance_factor = 0.1
outlier_variance_factor = 1.0
";

#[test]
fn sweep_writes_results_and_summary_with_stable_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("sweep.toml"), SWEEP_CONFIG).unwrap();
    let out = run_in(
        dir,
        &[
            "sweep",
            "--config",
            "sweep.toml",
            "--output-dir",
            "sw",
            "--plot",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let results = fs::read_to_string(dir.join("sw/results.csv")).unwrap();
    let lines: Vec<&str> = results.lines().collect();
    assert_eq!(lines[0], "fraction,method,trial,accuracy");
    // 2 fractions x 2 methods x 2 trials.
    assert_eq!(lines.len(), 1 + 8);
    assert_eq!(lines[1].split(',').count(), 4);
    // Methods appear lrr-first within each fraction, trials ascending.
    assert!(lines[1].starts_with("0,lrr,0,"));
    assert!(lines[3].starts_with("0,rsi,0,"));
    assert!(lines[5].starts_with("0.3,lrr,0,"));

    let summary = fs::read_to_string(dir.join("sw/summary.csv")).unwrap();
    let slines: Vec<&str> = summary.lines().collect();
    assert_eq!(slines[0], "fraction,method,mean,std");
    assert_eq!(slines.len(), 1 + 4);
    // Means carry at least 10 significant digits.
    let mean_field = slines[1].split(',').nth(2).unwrap();
    let digits = mean_field.chars().filter(|c| c.is_ascii_digit()).count();
    assert!(
        digits >= 10,
        "expected >=10 significant digits, got {mean_field}"
    );

    let svg = fs::read_to_string(dir.join("sw/plot.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("polyline"));
}

#[test]
fn sweep_output_is_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("sweep.toml"), SWEEP_CONFIG).unwrap();
    for (sub, threads) in [("t1", "1"), ("t4", "4"), ("t2", "2")] {
        let out = run_in(
            dir,
            &["sweep", "--config", "sweep.toml", "--output-dir", sub],
            &[("SUBSEG_THREADS", threads)],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let r1 = fs::read(dir.join("t1/results.csv")).unwrap();
    assert_eq!(r1, fs::read(dir.join("t4/results.csv")).unwrap());
    assert_eq!(r1, fs::read(dir.join("t2/results.csv")).unwrap());
    let s1 = fs::read(dir.join("t1/summary.csv")).unwrap();
    assert_eq!(s1, fs::read(dir.join("t4/summary.csv")).unwrap());
    assert_eq!(s1, fs::read(dir.join("t2/summary.csv")).unwrap());
}

#[test]
fn sweep_rejects_invalid_grids() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let bad = SWEEP_CONFIG.replace("fractions = [0.0, 0.3]", "fractions = [0.0, 1.5]");
    fs::write(dir.join("sweep.toml"), bad).unwrap();
    let out = run_in(dir, &["sweep", "--config", "sweep.toml"], &[]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    let bad = SWEEP_CONFIG.replace("trials = 2", "trials = 1");
    fs::write(dir.join("sweep.toml"), bad).unwrap();
    let out = run_in(dir, &["sweep", "--config", "sweep.toml"], &[]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}
