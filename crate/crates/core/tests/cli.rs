//! End-to-end tests of the `weakmul` binary: argument validation and exit
//! codes, output-directory resolution, file formats, and the distinction
//! between usage errors (exit 1) and failed mathematical checks (exit 3).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Command handle for the compiled binary with the output-directory
/// environment variable cleared, so a host environment cannot leak into
/// resolution tests.
fn weakmul() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_weakmul"));
    cmd.env_remove("WEAKMUL_OUT");
    cmd
}

fn run(args: &[&str]) -> Output {
    weakmul().args(args).output().expect("spawn weakmul")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("terminated by signal")
}

fn stderr_text(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout_text(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

/// Asserts the run failed as a usage/config error: exit 1 and a diagnostic
/// containing `needle` on stderr.
fn assert_usage_error(args: &[&str], needle: &str) {
    let output = run(args);
    assert_eq!(
        exit_code(&output),
        1,
        "{args:?} should exit 1; stderr: {}",
        stderr_text(&output)
    );
    let err = stderr_text(&output);
    assert!(
        err.contains(needle),
        "{args:?} stderr should mention {needle:?}, got: {err}"
    );
}

// -------------------------------------------------------------------------
// Help, version, and unknown-command handling.

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert_eq!(exit_code(&help), 0);
    let text = stdout_text(&help);
    for sub in [
        "sharpness",
        "weak11",
        "zygmund",
        "chain",
        "restriction",
        "probe-linfty",
    ] {
        assert!(text.contains(sub), "help should list `{sub}`: {text}");
    }

    let version = run(&["--version"]);
    assert_eq!(exit_code(&version), 0);
    assert!(stdout_text(&version).contains("weakmul"));

    let unknown = run(&["frobnicate"]);
    assert_eq!(exit_code(&unknown), 1, "unknown subcommand is a usage error");
}

// -------------------------------------------------------------------------
// Argument validation: every bad-input path is exit 1 with a diagnostic
// naming the problem.

#[test]
fn rejects_invalid_exponent_and_n_range() {
    assert_usage_error(
        &["sharpness", "--r", "0.5", "--n-max", "16", "--n-count", "4"],
        "r must be >= 1",
    );
    assert_usage_error(
        &["sharpness", "--n-min", "4", "--n-max", "2", "--n-count", "4"],
        "need 0 < n-min < n-max",
    );
    assert_usage_error(
        &["sharpness", "--n-max", "16", "--n-count", "3"],
        "need at least 4 n values",
    );
}

#[test]
fn rejects_unknown_families() {
    assert_usage_error(
        &["weak11", "--paper-example", "--family", "squares"],
        "known families: gaussians, indicators, bumps",
    );
    assert_usage_error(
        &["restriction", "--family", "squiggles"],
        "known families: dilated-bumps",
    );
    assert_usage_error(&["restriction", "--count", "0"], "count must be positive");
}

#[test]
fn requires_a_multiplier_source() {
    assert_usage_error(&["chain"], "provide --multiplier <file> or --paper-example");
    assert_usage_error(
        &["zygmund"],
        "provide --multiplier <file> or --paper-example",
    );
}

#[test]
fn rejects_dimension_mismatch_and_bad_description() {
    // The built-in example is one-dimensional.
    assert_usage_error(
        &["chain", "--paper-example", "--dim", "2"],
        "does not match the multiplier description's dimension 1",
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let output = run(&["zygmund", "--multiplier", bad.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1, "malformed description is exit 1");
    assert!(
        stderr_text(&output).starts_with("error:"),
        "diagnostic goes to stderr"
    );

    let missing = dir.path().join("nope.json");
    let output = run(&["zygmund", "--multiplier", missing.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1, "missing description file is exit 1");
}

// -------------------------------------------------------------------------
// Output-directory resolution: --out beats $WEAKMUL_OUT beats ./runs.

#[test]
fn out_dir_resolution_order() {
    let root = tempfile::tempdir().unwrap();
    let flag_dir = root.path().join("from-flag");
    let env_dir = root.path().join("from-env");
    let cwd = root.path().join("cwd");
    std::fs::create_dir(&cwd).unwrap();

    let run_zygmund = |extra: &[&str], env: Option<&Path>| -> Output {
        let mut cmd = weakmul();
        cmd.args(["zygmund", "--paper-example"])
            .args(extra)
            .current_dir(&cwd);
        if let Some(dir) = env {
            cmd.env("WEAKMUL_OUT", dir);
        }
        cmd.output().expect("spawn weakmul")
    };

    let output = run_zygmund(&["--out", flag_dir.to_str().unwrap()], Some(&env_dir));
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr_text(&output));
    assert!(flag_dir.join("zygmund.json").is_file(), "--out wins");
    assert!(!env_dir.exists(), "env dir untouched when --out is given");

    let output = run_zygmund(&[], Some(&env_dir));
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr_text(&output));
    assert!(env_dir.join("zygmund.json").is_file(), "env var is the fallback");

    let output = run_zygmund(&[], None);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr_text(&output));
    assert!(
        cwd.join("runs").join("zygmund.json").is_file(),
        "default is ./runs"
    );
}

// -------------------------------------------------------------------------
// A failed mathematical check is exit 3, distinct from usage errors.
//
// The description below is engineered to break the bilinear-expansion step:
// the second summand's spectral factor is a double bump whose inverse
// transform peaks exactly on the two-point sphere, while the first summand's
// peaks far away, so the per-summand sup bound (which pairs each summand
// with its own sup) exceeds the cross-term expansion it should be below.

const CHAIN_BREAKING_DESCRIPTION: &str = r#"{
  "dimension": 1,
  "q": 1.0,
  "summands": [
    {
      "f": {
        "kind": "spectral",
        "descriptor": { "form": "gaussian", "decay": 4.0, "amplitude": 1.0, "center": [-5.0] }
      },
      "g": {
        "kind": "spectral",
        "descriptor": { "form": "gaussian", "decay": 0.25, "amplitude": 1.0 }
      }
    },
    {
      "f": {
        "kind": "spectral",
        "descriptor": {
          "form": "sum",
          "terms": [
            { "coefficient": 1.0, "term": { "form": "gaussian", "decay": 4.0, "amplitude": 1.0, "center": [-1.0] } },
            { "coefficient": 1.0, "term": { "form": "gaussian", "decay": 4.0, "amplitude": 1.0, "center": [1.0] } }
          ]
        }
      },
      "g": {
        "kind": "spectral",
        "descriptor": { "form": "gaussian", "decay": 0.25, "amplitude": 4.0 }
      }
    }
  ]
}"#;

#[test]
fn failed_chain_check_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("off-sphere.json");
    std::fs::write(&spec_path, CHAIN_BREAKING_DESCRIPTION).unwrap();
    let out = dir.path().join("out");

    let output = run(&[
        "chain",
        "--multiplier",
        spec_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        exit_code(&output),
        3,
        "violated chain should exit 3; stderr: {}",
        stderr_text(&output)
    );
    let text = stdout_text(&output);
    assert!(
        text.contains("bilinear-expansion") && text.contains("[FAIL]"),
        "the bilinear-expansion step should be reported failing: {text}"
    );
    // The report is still written so the failure can be inspected.
    assert!(out.join("chain.json").is_file());

    // Sanity check of the discriminant: the well-formed built-in example
    // passes the same command with exit 0.
    let output = run(&["chain", "--paper-example", "--out", out.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr_text(&output));
}

// -------------------------------------------------------------------------
// File-driven runs and output formats.

/// A small well-formed description: one summand, Gaussian × Gaussian,
/// mirroring the shape a user would write by hand.
const SIMPLE_DESCRIPTION: &str = r#"{
  "dimension": 1,
  "q": 1.0,
  "summands": [
    {
      "f": {
        "kind": "spectral",
        "descriptor": { "form": "gaussian", "decay": 1.0, "amplitude": 1.0 }
      },
      "g": {
        "kind": "spectral",
        "descriptor": { "form": "gaussian", "decay": 1.0, "amplitude": 1.0 }
      }
    }
  ]
}"#;

fn write_description(dir: &Path) -> PathBuf {
    let path = dir.join("multiplier.json");
    std::fs::write(&path, SIMPLE_DESCRIPTION).unwrap();
    path
}

#[test]
fn weak11_runs_from_description_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = write_description(dir.path());
    let out = dir.path().join("out");

    let output = run(&[
        "weak11",
        "--multiplier",
        spec_path.to_str().unwrap(),
        "--family",
        "gaussians",
        "--n-min",
        "1",
        "--n-max",
        "8",
        "--n-count",
        "4",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr_text(&output));

    // Single-family runs use the unsuffixed file names.
    let csv = std::fs::read_to_string(out.join("weak11.csv")).unwrap();
    let json = std::fs::read_to_string(out.join("weak11.json")).unwrap();
    assert!(
        csv.lines().take_while(|l| l.starts_with('#')).count() > 0,
        "CSV begins with a header block: {csv}"
    );
    let columns = csv
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("column line");
    assert_eq!(columns, "index,label,ratio");
    assert!(
        json.contains(spec_path.to_str().unwrap()),
        "header records the description path"
    );
}

#[test]
fn probe_linfty_writes_expected_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "probe-linfty",
        "--paper-example",
        "--levels",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr_text(&output));

    let csv = std::fs::read_to_string(out.join("probe_linfty.csv")).unwrap();
    let columns = csv
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("column line");
    assert_eq!(columns, "extent,points_per_axis,sup_abs,sum_f_l1,sum_g_l1");
    let data_rows = csv
        .lines()
        .skip_while(|l| l.starts_with('#'))
        .skip(1)
        .filter(|l| !l.is_empty())
        .count();
    assert_eq!(data_rows, 1, "one row per grid level");

    assert_usage_error(
        &["probe-linfty", "--paper-example", "--levels", "0"],
        "levels must lie in 1..=6",
    );
}
