//! End-to-end tests driving the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclust"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn parse_stdout(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("valid JSON on stdout")
}

fn parse_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).expect("valid JSON file")
}

fn blob_run_args<'a>(extra: &[&'a str], out: &'a str) -> Vec<&'a str> {
    let mut args = vec!["run", "--blobs", "2,6", "--seed", "7", "--out", out];
    args.extend_from_slice(extra);
    args
}

#[test]
fn full_run_reproduces_the_blob_split() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.json");
    let trace = dir.path().join("trace.csv");
    let output = qclust(&blob_run_args(
        &["--trace", trace.to_str().unwrap()],
        out.to_str().unwrap(),
    ));
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    let report = parse_file(&out);
    assert_eq!(report["schema"], 1);
    assert_eq!(report["assignment"], serde_json::json!([1, 1, 2, 2, 2, 2, 2, 2]));
    assert_eq!(report["cluster_sizes"], serde_json::json!([2, 6]));
    assert_eq!(report["oracle"]["agrees"], true);
    assert_eq!(report["lloyd"]["same_bipartition"], true);

    // The two most probable final states are a complementary ket pair.
    let top = report["top_states"].as_array().unwrap();
    let kets: Vec<&str> = top[..2].iter().map(|t| t["ket"].as_str().unwrap()).collect();
    assert!(kets.contains(&"00111111") && kets.contains(&"11000000"), "kets {kets:?}");
    let p0 = top[0]["probability"].as_f64().unwrap();
    let p1 = top[1]["probability"].as_f64().unwrap();
    assert!((p0 - p1).abs() <= 1e-6);
    assert!(report["evolution"]["norm_drift_max"].as_f64().unwrap() <= 1e-6);
    assert!(report["anova_residual"].as_f64().unwrap().abs() <= 1e-9);

    // Trace layout: header plus one row per sample, 2^8 state columns.
    let text = fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("t,state_0,") && header.ends_with(",norm_drift"));
    assert_eq!(header.split(',').count(), 258);
    assert_eq!(lines.count(), 201);
}

#[test]
fn reduced_run_matches_the_full_bipartition() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reduced.json");
    let output = qclust(&blob_run_args(
        &["--model", "reduced", "--fixed-index", "1"],
        out.to_str().unwrap(),
    ));
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report = parse_file(&out);
    assert_eq!(report["model"]["kind"], "reduced");
    assert_eq!(report["model"]["fixed_index"], 1);
    assert_eq!(report["model"]["num_spins"], 7);
    assert_eq!(report["assignment"], serde_json::json!([1, 1, 2, 2, 2, 2, 2, 2]));
    assert_eq!(report["oracle"]["agrees"], true);
    let top = report["top_states"].as_array().unwrap();
    let gap = top[0]["probability"].as_f64().unwrap() - top[1]["probability"].as_f64().unwrap();
    assert!(gap > 0.0, "no rank-1/rank-2 gap");
}

#[test]
fn identical_configs_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(format!("{name}.json"));
        let trace = dir.path().join(format!("{name}.csv"));
        let output = qclust(&blob_run_args(
            &["--trace", trace.to_str().unwrap(), "--samples", "51"],
            out.to_str().unwrap(),
        ));
        assert!(output.status.success());
        outputs.push((fs::read(&out).unwrap(), fs::read(&trace).unwrap()));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "result JSON differs between runs");
    assert_eq!(outputs[0].1, outputs[1].1, "trace CSV differs between runs");
}

#[test]
fn brute_reports_the_ground_pair() {
    let output = qclust(&["brute", "--blobs", "2,6", "--seed", "7"]);
    let report = parse_stdout(&output);
    assert_eq!(report["ground_state_count"], 2);
    let states = report["ground_states"].as_array().unwrap();
    let kets: Vec<&str> = states.iter().map(|s| s["ket"].as_str().unwrap()).collect();
    assert_eq!(kets, vec!["00111111", "11000000"]);
    for state in states {
        assert_eq!(
            state["energy"].as_f64().unwrap(),
            report["min_energy"].as_f64().unwrap()
        );
        assert!(state["assignment"].is_array());
    }
}

#[test]
fn brute_on_reduced_model_has_a_unique_ground_state() {
    let output = qclust(&[
        "brute", "--blobs", "2,6", "--seed", "7", "--model", "reduced", "--fixed-index", "1",
    ]);
    let report = parse_stdout(&output);
    assert_eq!(report["ground_state_count"], 1);
    assert_eq!(
        report["ground_states"][0]["assignment"],
        serde_json::json!([1, 1, 2, 2, 2, 2, 2, 2])
    );
}

#[test]
fn two_antipodal_points_split_apart() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pair.csv");
    fs::write(&csv, "1,0\n-1,0\n").unwrap();
    let out = dir.path().join("pair.json");
    let output = qclust(&[
        "run",
        "--input",
        csv.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report = parse_file(&out);
    assert_eq!(report["assignment"], serde_json::json!([1, 2]));
    // The ground energy of the pair is -|x1 - x2|^2.
    let min_energy = report["oracle"]["min_energy"].as_f64().unwrap();
    assert!((min_energy - -4.0).abs() <= 1e-9 * 4.0);
}

#[test]
fn verify_anova_sweep_passes() {
    let output = qclust(&["verify-anova", "--blobs", "6,10", "--trials", "1000", "--seed", "5"]);
    let report = parse_stdout(&output);
    assert_eq!(report["trials"], 1000);
    assert_eq!(report["pass"], true);
    assert!(report["max_relative_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn gen_blobs_is_deterministic_and_readable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let output = qclust(&[
            "gen-blobs", "--n1", "2", "--n2", "6", "--seed", "7", "--out",
            path.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let header = qclust(&["gen-blobs", "--n1", "1", "--n2", "2", "--header"]);
    let text = String::from_utf8(header.stdout).unwrap();
    assert!(text.starts_with("x1,x2\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    let cases: Vec<(Vec<&str>, i32, &str)> = vec![
        (vec!["run", "--blobs", "2,6", "--model", "reduced"], 2, "missing fixed index"),
        (vec!["run", "--blobs", "2,6", "--fixed-index", "3"], 2, "fixed index on full model"),
        (vec!["run", "--blobs", "2,6", "--model", "reduced", "--fixed-index", "9"], 2, "fixed index out of range"),
        (vec!["run", "--blobs", "2,6", "--kernel", "rbf:-1"], 2, "bad kernel"),
        (vec!["run", "--blobs", "2,6", "--kernel", "gauss"], 2, "unknown kernel"),
        (vec!["run", "--blobs", "0,6"], 2, "empty blob"),
        (vec!["run"], 2, "no data source"),
        (vec!["run", "--input", "/nonexistent/data.csv"], 1, "missing input file"),
        (vec!["run", "--blobs", "2,6", "--steps", "50", "--samples", "20"], 3, "unstable step count"),
    ];
    for (args, want, what) in cases {
        let output = qclust(&args);
        assert_eq!(output.status.code(), Some(want), "{what}: {args:?}");
    }

    // Two identical points decode to an all-equal spin state.
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("deg.csv");
    fs::write(&csv, "0,0\n0,0\n").unwrap();
    let output = qclust(&["run", "--input", csv.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(4), "degenerate clustering");
}

#[test]
fn malformed_csv_is_an_io_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "1.0,2.0\n3.0,oops\n").unwrap();
    let output = qclust(&["run", "--input", csv.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}
