//! The `rdars-sim` binary: exit codes and artifacts.

use std::process::{Command, Output};

use rdars::experiments::{read_rows, ResultRow, CSV_COLUMNS};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdars-sim"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn validate_accepts_and_canonicalises() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(&path, "[rdars]\nelements = 64\n").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let canonical = String::from_utf8(out.stdout).unwrap();
    assert!(canonical.contains("elements = 64"));

    std::fs::write(&path, &canonical).unwrap();
    let again = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), canonical);

    std::fs::write(&path, "").unwrap();
    assert_eq!(
        run(&["validate", path.to_str().unwrap()]).status.code(),
        Some(0)
    );
}

#[test]
fn validate_rejects_with_field_paths() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[rdars]\nelements = 4\nconnected = 5\n").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("rdars.connected") && err.contains("rdars.elements"),
        "{err}"
    );

    std::fs::write(&path, "[rdars]\nelemnts = 4\n").unwrap();
    assert_eq!(
        run(&["validate", path.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["validate", "/nonexistent/x.toml"]).status.code(),
        Some(1)
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["calc", "nope"]).status.code(), Some(1));
    assert_eq!(
        run(&["calc", "gamma-fit", "--mean", "x"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["figure", "fig9"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn calc_gamma_fit() {
    let out = run(&["calc", "gamma-fit", "--mean", "2", "--second-moment", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["outputs"]["shape_k"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((v["outputs"]["scale_p"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["inputs"]["mean"].as_f64(), Some(2.0));

    let degenerate = run(&["calc", "gamma-fit", "--mean", "2", "--second-moment", "3"]);
    assert_eq!(degenerate.status.code(), Some(1));
}

#[test]
fn calc_threshold_with_mean_snr_preset() {
    let v = json(&run(&["calc", "threshold", "--mean-snr-preset"]));
    let n = v["outputs"]["ris_crossover_n"].as_f64().unwrap();
    assert!((n / 8.1e6 - 1.0).abs() < 0.02);
}

// Monte Carlo reference at 10⁶ trials (seed 1, Rayleigh links, optimal
// phases, N = 1024, a = 2), frozen.
const RATE_SISO_GOLDEN: f64 = 2.909085;

#[test]
fn calc_rate_siso_near_monte_carlo_golden() {
    let v = json(&run(&[
        "calc",
        "rate-siso",
        "--elements",
        "1024",
        "--connected",
        "2",
    ]));
    let r = v["outputs"]["ergodic_rate_gamma_bps_hz"].as_f64().unwrap();
    assert!((r - RATE_SISO_GOLDEN).abs() <= 0.1, "{r}");
    assert!(v["outputs"]["rate_upper_bound_bps_hz"].as_f64().unwrap() >= r);
}

#[test]
fn calc_scenario_backed_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(&path, "[rdars]\nelements = 128\nconnected = 2\n").unwrap();
    for sub in [
        "snr-moments",
        "rate-siso",
        "rate-simo",
        "bound",
        "threshold",
    ] {
        let out = run(&["calc", sub, "--scenario", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        assert_eq!(json(&out)["inputs"]["n_total"].as_u64(), Some(128), "{sub}");
    }
    let out = run(&["calc", "rate-simo", "--connected", "600"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn figure_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let args = [
        "figure",
        "fig5b",
        "--out",
        csv.to_str().unwrap(),
        "--seed",
        "5",
        "--override",
        "simulation.trials=300",
    ];
    let out = run(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let bytes = std::fs::read(&csv).unwrap();
    let header = String::from_utf8(bytes.clone())
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(header, CSV_COLUMNS.join(","));
    let rows: Vec<ResultRow> = read_rows(&bytes).unwrap();
    let field_names: Vec<String> = serde_json::to_value(&rows[0])
        .unwrap()
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    let mut sorted_cols: Vec<String> = CSV_COLUMNS.iter().map(|s| s.to_string()).collect();
    sorted_cols.sort();
    let mut sorted_fields = field_names;
    sorted_fields.sort();
    assert_eq!(sorted_fields, sorted_cols);

    let side: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("f.json")).unwrap()).unwrap();
    for key in [
        "scenario",
        "seed",
        "tool_version",
        "timestamp",
        "git_describe",
        "wall_time_s",
    ] {
        assert!(side.get(key).is_some(), "sidecar lacks {key}");
    }
    assert_eq!(side["seed"].as_u64(), Some(5));

    run(&args);
    assert_eq!(std::fs::read(&csv).unwrap(), bytes);

    let blocked = run(&["figure", "fig3", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(blocked.status.code(), Some(1));
}
