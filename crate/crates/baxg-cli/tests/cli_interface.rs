//! End-to-end checks of the `baxg` binary: subcommands, file outputs, the
//! exact CSV schema, exit codes, and byte-level run determinism.

use std::path::Path;
use std::process::{Command, Output};

fn baxg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_baxg"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn small_run_args<'a>(algo: &'a str, out: &'a str) -> Vec<&'a str> {
    vec![
        "run",
        "--problem",
        "smoothed-l1-eq",
        "--d",
        "30",
        "--n",
        "15",
        "--lambda",
        "1e-4",
        "--seed",
        "5",
        "--algo",
        algo,
        "--max-oracle",
        "600",
        "--out",
        out,
    ]
}

#[test]
fn run_writes_csv_with_exact_schema() {
    let dir = tempfile::tempdir().unwrap();
    let output = baxg(&small_run_args("baxg", "trace.csv"), dir.path());
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let content = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = content.lines();
    assert_eq!(
        lines.next().unwrap(),
        "algorithm,problem,seed,lambda,k,oracle_total,merit,inner_iters,wall_ms"
    );
    let first = lines.next().unwrap();
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(fields.len(), 9);
    assert_eq!(fields[0], "baxg");
    assert_eq!(fields[1], "smoothed-l1-eq");
    assert_eq!(fields[2], "5");
    assert_eq!(fields[3], "1.000000000000e-04");
    assert!(!content.contains('\r'));
    assert!(content.ends_with('\n'));
}

#[test]
fn identical_configs_produce_identical_csv_modulo_wall_ms() {
    let dir = tempfile::tempdir().unwrap();
    assert!(baxg(&small_run_args("baxg", "a.csv"), dir.path())
        .status
        .success());
    assert!(baxg(&small_run_args("baxg", "b.csv"), dir.path())
        .status
        .success());
    let strip = |name: &str| {
        std::fs::read_to_string(dir.path().join(name))
            .unwrap()
            .lines()
            .map(|l| {
                l.rsplit_once(',')
                    .map(|(rest, _)| rest.to_string())
                    .unwrap_or_default()
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip("a.csv"), strip("b.csv"));
}

#[test]
fn generate_emits_instance_summary_json() {
    let dir = tempfile::tempdir().unwrap();
    let output = baxg(
        &[
            "generate",
            "--problem",
            "lad",
            "--d",
            "24",
            "--n",
            "12",
            "--seed",
            "9",
            "--out",
            "inst.json",
        ],
        dir.path(),
    );
    assert!(output.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("inst.json")).unwrap())
            .unwrap();
    assert_eq!(json["problem"], "lad");
    assert_eq!(json["d"], 24);
    assert!(json["sigma_min"].as_f64().unwrap() > 0.0);
    assert_eq!(json["ground_truth"]["kind"], "lad");
}

#[test]
fn plot_renders_svg_from_traces() {
    let dir = tempfile::tempdir().unwrap();
    assert!(baxg(&small_run_args("baxg", "a.csv"), dir.path())
        .status
        .success());
    assert!(baxg(&small_run_args("eg", "b.csv"), dir.path())
        .status
        .success());
    let output = baxg(
        &["plot", "--out", "chart.svg", "a.csv", "b.csv"],
        dir.path(),
    );
    assert!(output.status.success());
    let svg = std::fs::read_to_string(dir.path().join("chart.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn sweep_writes_best_trace() {
    let dir = tempfile::tempdir().unwrap();
    let output = baxg(
        &[
            "sweep",
            "--problem",
            "smoothed-l1-eq",
            "--d",
            "24",
            "--n",
            "12",
            "--seed",
            "5",
            "--max-oracle",
            "400",
            "--lipschitz-grid",
            "1e-2,1e-1,1",
            "--out",
            "best.csv",
        ],
        dir.path(),
    );
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("best: L ="), "stdout: {stdout}");
    assert!(dir.path().join("best.csv").exists());
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    // n > d is rejected by validation.
    let output = baxg(
        &[
            "run",
            "--problem",
            "lad",
            "--d",
            "5",
            "--n",
            "10",
            "--out",
            "x.csv",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));
    // Unknown flags are rejected by the parser with the same code.
    let output = baxg(&["run", "--no-such-flag"], dir.path());
    assert_eq!(output.status.code(), Some(2));
    // Empty sweep grid.
    let output = baxg(
        &[
            "sweep",
            "--problem",
            "lad",
            "--d",
            "6",
            "--n",
            "3",
            "--lipschitz-grid",
            "-1",
            "--out",
            "x.csv",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    let output = baxg(
        &[
            "run",
            "--problem",
            "smoothed-l1-eq",
            "--d",
            "10",
            "--n",
            "5",
            "--max-oracle",
            "50",
            "--out",
            "no/such/dir/trace.csv",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(4));
    let output = baxg(&["plot", "--out", "c.svg", "missing.csv"], dir.path());
    assert_eq!(output.status.code(), Some(4));
}
