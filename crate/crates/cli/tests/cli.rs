//! End-to-end CLI tests driving the compiled binary: documented exit codes,
//! output schemas, and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn mdeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdeq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn catalog_lists_thirteen_entries() {
    let out = mdeq(&["catalog"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema_version"], "1");
    assert_eq!(doc["entries"].as_array().unwrap().len(), 13);
}

#[test]
fn catalog_single_entry_shows_constraint() {
    let out = mdeq(&["catalog", "--id", "E19", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(
        text.contains("8·delta^5·(delta^2 + 1) - (delta + 1)^4 = 0"),
        "constraint missing from: {text}"
    );
}

#[test]
fn catalog_materialized_json_with_params() {
    let out = mdeq(&["catalog", "--id", "E12", "--param", "kappa=2"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["id"], "E12");
    assert_eq!(doc["n"], 2);
    assert_eq!(doc["params"]["kappa"][0], 2.0);
    assert!(doc["curve"].is_object());
}

#[test]
fn orbit_e12_clean_run_exits_zero() {
    let out = mdeq(&[
        "orbit", "--id", "E12", "--param", "kappa=2", "--f0", "3", "--steps", "50", "--policy",
        "nearest",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("max residual"));
}

#[test]
fn orbit_bad_kappa_exits_two() {
    let out = mdeq(&["orbit", "--id", "E12", "--param", "kappa=1", "--f0", "3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn orbit_singular_start_exits_three() {
    // f0 = 1 is a pole of R for E12.
    let out = mdeq(&["orbit", "--id", "E12", "--param", "kappa=2", "--f0", "1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn orbit_fixed_sequence_reproduces_sine() {
    let out = mdeq(&[
        "orbit",
        "--id",
        "E9",
        "--f0",
        "0",
        "--steps",
        "8",
        "--policy",
        "fixed:0,0,1,0,0,0,1,0",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let res: Vec<f64> = text
        .lines()
        .skip(1)
        .take(9)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let want = [0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0];
    for (got, want) in res.iter().zip(want.iter()) {
        assert!((got - want).abs() < 1e-12, "sine samples: {res:?}");
    }
}

#[test]
fn orbit_output_is_deterministic() {
    let args = [
        "orbit", "--id", "E14", "--param", "eta=exp:1/3", "--f0", "0.4,0.3", "--steps", "30",
        "--format", "csv",
    ];
    let a = mdeq(&args);
    let b = mdeq(&args);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn invariant_fit_recovers_e12_curve() {
    let out = mdeq(&[
        "invariant", "--id", "E12", "--param", "kappa=2", "--f0", "3", "--steps", "50", "--fit",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("invariant drift"));
    assert!(text.contains("cosine distance to registered curve 0.000e0") || {
        // allow a nonzero-but-tiny report
        let tail = text.split("cosine distance to registered curve ").nth(1).unwrap();
        tail.trim_end().parse::<f64>().map(|v| v < 1e-8).unwrap_or(false)
    });
}

#[test]
fn invariant_short_fit_exits_four() {
    let out = mdeq(&[
        "invariant", "--id", "E12", "--param", "kappa=2", "--f0", "3", "--steps", "8", "--fit",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn invariant_reads_orbit_csv_back() {
    let dir = std::env::temp_dir();
    let path: PathBuf = dir.join("mdeq_test_orbit_roundtrip.csv");
    let path_str = path.to_str().unwrap();
    let out = mdeq(&[
        "orbit", "--id", "E12", "--param", "kappa=2", "--f0", "3", "--steps", "40", "--format",
        "csv", "--out", path_str,
    ]);
    assert_eq!(code(&out), 0);
    let out = mdeq(&[
        "invariant", "--id", "E12", "--param", "kappa=2", "--in", path_str,
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("invariant drift over 40 pairs"));
    let _ = std::fs::remove_file(path);
}

#[test]
fn limit_riccati_reports_second_order_and_band_gate() {
    let out = mdeq(&[
        "limit", "riccati", "--Atilde", "1", "--T", "0.8", "--eps", "2^-4..2^-10",
    ]);
    assert_eq!(code(&out), 0, "report-only run exits 0");
    let text = stdout(&out);
    let order: f64 = text
        .split("fitted order ")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((1.85..=2.15).contains(&order), "measured order {order}");

    // The gate exits 1 when the order misses the requested band.
    let out = mdeq(&[
        "limit", "riccati", "--Atilde", "1", "--T", "0.8", "--eps", "2^-4..2^-10", "--band",
        "0.85,1.15",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn limit_riccati_zero_a_is_exact() {
    let out = mdeq(&[
        "limit", "riccati", "--Atilde", "0", "--w0", "1", "--T", "0.5", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0);
    for line in stdout(&out).lines().skip(1) {
        if line.starts_with("fitted") {
            break;
        }
        let err: f64 = match line.split(',').nth(1) {
            Some(v) => v.parse().unwrap(),
            None => continue,
        };
        assert!(err < 1e-12, "error {err} not at roundoff");
    }
}

#[test]
fn limit_riccati_blowup_exits_five() {
    let out = mdeq(&["limit", "riccati", "--Atilde", "1", "--T", "2", "--eps", "2^-4..2^-6"]);
    assert_eq!(code(&out), 5);
}

#[test]
fn limit_qrt_relation_residual_small() {
    let out = mdeq(&["limit", "qrt", "--k", "0.5", "--T", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("scaled-relation residual"));
}

#[test]
fn constants_commands() {
    let out = mdeq(&["constants", "E17", "--theta", "-1", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("2 admissible assignments"));
    assert!(text.contains("+2.828427124746") && text.contains("-2.828427124746"));

    let out = mdeq(&["constants", "E19"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("6 admissible assignments"));

    let out = mdeq(&["constants", "E9"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_json_schema_and_exit_consistency() {
    let out = mdeq(&["verify", "--json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema_version"], "1");
    let criteria = doc["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 10);
    let all_passed = doc["all_passed"].as_bool().unwrap();
    assert_eq!(code(&out) == 0, all_passed, "exit code mirrors all_passed");
    // Criterion 6 carries the known second-order measurement.
    let c6 = &criteria[5];
    assert_eq!(c6["id"], 6);
    assert!(c6["details"]
        .as_str()
        .unwrap()
        .contains("measured second-order scheme"));
}
