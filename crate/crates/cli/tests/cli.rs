use std::path::Path;
use std::process::{Command, Output};

use bessel_hitting::numerics::{Complex64, QuadratureConfig};
use bessel_hitting::transforms::{mellin, BesselSpec, Boundary, IndexSign};
use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bessel-hitting"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Re-runs the `# command:` echo of an output and returns the new stdout.
fn rerun_echo(text: &str) -> Output {
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix("# command: "))
        .expect("command echo present");
    let mut words = line.split_whitespace();
    assert_eq!(words.next(), Some("bessel-hitting"));
    bin().args(words).output().unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn transform_trivial_values() {
    let out = run(&["transform", "--index", "neg", "--nu", "0.5", "--b", "0.25", "--c", "1", "--s", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(data_rows(&stdout(&out)), vec![vec![0.0, 1.0]]);

    let out = run(&["transform", "--index", "pos", "--nu", "0.5", "--b", "0.25", "--c", "1", "--s", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = data_rows(&stdout(&out))[0][1];
    assert!((v - 1.0).abs() < 1e-12, "{v}");
}

#[test]
fn transform_matches_golden_file_and_library() {
    let out = run(&["transform", "--index", "neg", "--nu", "0.5", "--b", "0.25", "--c", "1", "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/transform_neg_s1.csv")).unwrap();
    assert_eq!(stdout(&out), golden);

    let spec = BesselSpec::new(0.5, IndexSign::Negative).unwrap();
    let bnd = Boundary::new(0.25, 1.0).unwrap();
    let lib = mellin(&spec, &bnd, Complex64::new(1.0, 0.0), &QuadratureConfig::default()).unwrap().re;
    assert_eq!(data_rows(&golden)[0][1], lib);
}

#[test]
fn echoed_command_reproduces_output() {
    let out = run(&["transform", "--index", "pos", "--nu", "1.2", "--b", "0.1", "--c", "0.4", "--s", "2", "--s", "3.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let command = doc["command"].as_str().unwrap();
    let again = rerun_echo(&format!("# command: {command}\n"));
    assert_eq!(stdout(&again), text);
}

#[test]
fn usage_errors_exit_2() {
    let cases: [&[&str]; 5] = [
        &["transform", "--index", "neg", "--nu", "0.5", "--b", "1", "--c", "1", "--s", "1"],
        &["transform", "--index", "neg", "--nu", "0.5", "--b", "0.25", "--c", "1"],
        &["transform", "--index", "neg", "--nu", "0.5", "--b", "0.25", "--c", "1", "--s", "-1"],
        &["--threads", "0", "verify", "--check", "duality"],
        &["verify", "--check", "whittaker", "--negative-control"],
    ];
    for args in cases {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn truncated_contour_exits_3() {
    let out = run(&[
        "density", "--index", "neg", "--nu", "0.5", "--b", "0.25", "--c", "1", "--ymin", "0.5", "--ymax", "2",
        "--points", "5", "--half-height", "60", "--step", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncated"));
}

#[test]
fn density_on_automatic_grid_normalizes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("density.csv");
    let out = run(&[
        "density", "--index", "neg", "--nu", "0.5", "--b", "0.25", "--c", "1", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mass: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# mass: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((mass - 1.0).abs() < 1e-3, "mass {mass}");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2000);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    assert!(rows.iter().all(|r| r[1] >= 0.0 && (0.0..=1.0).contains(&r[2])));
    assert!(rows[0][2] < 1e-3);
    assert!(rows.last().unwrap()[2] > 0.999);
}

#[test]
fn simulate_is_pinned_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let out = run(&[
        "simulate", "--index", "neg", "--nu", "0.5", "--b", "0.25", "--c", "1", "--paths", "1000", "--dt", "1e-3",
        "--seed", "7", "--summary", summary.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let digest = format!("{:x}", Sha256::digest(&out.stdout));
    assert_eq!(digest, "f7bff0dfc03debe5ff0328dc8da8c6103484862af29a13f796af4d067c1807c4");

    let text = stdout(&out);
    let sigmas: Vec<f64> = data_rows(&text).into_iter().map(|r| r[0]).collect();
    assert_eq!(sigmas.len(), 1000);
    assert!(sigmas.iter().all(|&s| s > 0.0));

    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert!(doc["summary"]["excluded_fraction"].as_f64().unwrap() < 1e-3);
    assert_eq!(doc["summary"]["moments"].as_array().unwrap().len(), 3);

    let again = rerun_echo(&text);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn simulate_json_carries_samples() {
    let out = run(&[
        "simulate", "--index", "pos", "--nu", "0.5", "--b", "0.25", "--c", "1", "--paths", "200", "--dt", "1e-3",
        "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["samples"]["values"].as_array().unwrap().len(), 200);
    assert_eq!(doc["config"]["paths"], 200);
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "--check", "duality"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["passed"], true);
    assert_eq!(doc["result"]["reports"][0]["name"], "duality");

    assert_eq!(run(&["verify", "--check", "whittaker", "--seed", "3"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--check", "duality", "--negative-control"]).status.code(), Some(1));
}
