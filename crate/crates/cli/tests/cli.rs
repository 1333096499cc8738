use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fidelab_cli::artifacts::read_csv;
use fidelab_cli::{compare_runs, run, validate_run, ExperimentConfig};
use serde_json::{json, Value};
use tempfile::TempDir;

fn fidelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fidelab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, doc: Value) -> String {
    let path = dir.join(name);
    fs::write(&path, doc.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn dicke_config(n_atoms: usize, experiment: &str, state: Value, stop: f64, points: usize) -> Value {
    json!({
        "experiment": experiment,
        "parameters": {
            "n_atoms": n_atoms, "coupling": 0.1, "mode_freq": 1.0,
            "state": state,
            "times": {"stop": stop, "points": points}
        }
    })
}

fn run_doc(doc: Value, out: &Path) {
    let config: ExperimentConfig = serde_json::from_value(doc).unwrap();
    run(&config, Some(out)).unwrap();
}

#[test]
fn vacuum_revives_at_one_period() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    run_doc(dicke_config(10, "dicke-analytic", json!({"fock": 0}), std::f64::consts::TAU, 400), &out);
    let data = read_csv(&out.join("dicke_fidelity.csv")).unwrap();
    assert_eq!(data.header, ["t", "F_analytic", "F_gaussian"]);
    let f = &data.columns[1];
    assert_eq!(f.len(), 400);
    assert!((f[0] - 1.0).abs() < 1e-12);
    assert!((f[399] - 1.0).abs() < 1e-12);
    // λ = Ng/ω = 1, so F(t) = exp(−2(1 − cos t)).
    for (t, v) in data.columns[0].iter().zip(f) {
        assert!((v - (-2.0 * (1.0 - t.cos())).exp()).abs() < 1e-12, "t = {t}");
    }
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("dicke_analytic.json")).unwrap()).unwrap();
    assert!((report["sigma"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn analytic_and_oracle_runs_agree() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("analytic"), tmp.path().join("oracle"));
    let state = json!({"adjacent_superposition": 2});
    run_doc(dicke_config(4, "dicke-analytic", state.clone(), 4.0, 60), &a);
    run_doc(dicke_config(4, "dicke-oracle", state, 4.0, 60), &b);
    let report = compare_runs(&a, &b, 1e-8).unwrap();
    assert!(report.passed, "{report:?}");
    assert_eq!(report.columns.len(), 1);
    assert_eq!(report.columns[0].column, "F_analytic~F_oracle");
}

#[test]
fn mismatched_grids_are_refused() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_doc(dicke_config(4, "dicke-analytic", json!({"fock": 1}), 2.0, 20), &a);
    run_doc(dicke_config(4, "dicke-analytic", json!({"fock": 1}), 2.0, 21), &b);
    let err = compare_runs(&a, &b, 1.0).unwrap_err();
    assert_eq!(err.exit_code(), 2);

    let out = fidelab(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--tol", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(stderr["error"]["kind"], "validation");
}

#[test]
fn identical_runs_are_byte_identical_and_compare_to_zero() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), "d.json", dicke_config(6, "dicke-analytic", json!({"fock": 3}), 5.0, 120));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = fidelab(&["run", "--config", &config, "--out", dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["dicke_fidelity.csv", "dicke_analytic.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    let out = fidelab(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--tol", "0"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["max_abs_diff"], 0.0);
}

#[test]
fn compare_exits_one_when_tolerance_is_exceeded() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_doc(dicke_config(4, "dicke-analytic", json!({"fock": 0}), 2.0, 20), &a);
    run_doc(dicke_config(8, "dicke-analytic", json!({"fock": 0}), 2.0, 20), &b);
    let out = fidelab(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn periodogram_peak_sits_at_the_aliased_frequency() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("pg");
    run_doc(
        json!({"experiment": "periodogram", "parameters": {
            "frequency": "1e43+100000", "sample_rate": 1000000, "count": 100000
        }}),
        &out,
    );
    let data = read_csv(&out.join("periodogram.csv")).unwrap();
    let (freqs, power) = (&data.columns[0], &data.columns[1]);
    let peak = (0..power.len()).max_by(|&i, &j| power[i].total_cmp(&power[j])).unwrap();
    assert_eq!(freqs[peak], 100000.0);
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("periodogram.json")).unwrap()).unwrap();
    assert!(report["peak_to_median_db"].as_f64().unwrap() >= 60.0);
    assert_eq!(validate_run(&out).unwrap(), 3);
}

#[test]
fn rng_demo_reports_uniform_counts() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("rng");
    run_doc(
        json!({"experiment": "rng-demo", "parameters": {
            "frequency": "1e43+7919", "sample_rate": 1000003, "count": 64000, "bins": 32
        }}),
        &out,
    );
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("uniformity.json")).unwrap()).unwrap();
    assert_eq!(report["counts"].as_array().unwrap().len(), 32);
    assert!(report["p_value"].as_f64().unwrap() > 0.01);
    assert!((report["mean"].as_f64().unwrap() - 0.5).abs() < 0.01);
}

#[test]
fn empty_time_grid_exits_with_validation_code() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), "d.json", dicke_config(4, "dicke-analytic", json!({"fock": 0}), 1.0, 10));
    let out_dir = tmp.path().join("never");
    let out = fidelab(&["run", "--config", &config, "--set", "times.points=0", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(stderr["error"]["exit_code"], 2);
    assert!(!out_dir.exists());
}

#[test]
fn oversized_chain_exits_with_capacity_code() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        "h.json",
        json!({"experiment": "hmh-check", "parameters": {
            "chain": {"n_sites": 4, "coupling_zz": 1.0, "field_x": 0.5},
            "n_values": [4, 25]
        }}),
    );
    let out = fidelab(&["run", "--config", &config, "--out", tmp.path().join("h").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let stderr: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(stderr["error"]["kind"], "capacity");
}

#[test]
fn missing_output_directory_is_a_config_error() {
    let config: ExperimentConfig = serde_json::from_value(dicke_config(4, "dicke-analytic", json!({"fock": 0}), 1.0, 5)).unwrap();
    assert_eq!(run(&config, None).unwrap_err().exit_code(), 2);
}

#[test]
fn spin_fidelity_sweep_writes_one_curve_per_size() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("spin");
    run_doc(
        json!({"experiment": "spin-fidelity", "parameters": {
            "chain": {"n_sites": 4, "coupling_zz": 1.0, "field_x": 0.5},
            "n_values": [4, 6],
            "times": {"horizon": 2.0, "points": 50},
            "tau_max": 1.0
        }}),
        &out,
    );
    for n in [4, 6] {
        let data = read_csv(&out.join(format!("fidelity_N{n}.csv"))).unwrap();
        assert_eq!(data.columns[1][0], 1.0);
        assert!(data.columns[1].iter().all(|f| (0.0..=1.0).contains(f)));
    }
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("spin_fidelity.json")).unwrap()).unwrap();
    assert_eq!(report["convergence"].as_array().unwrap().len(), 2);
    assert_eq!(validate_run(&out).unwrap(), 3);
}

#[test]
fn validation_catches_a_tampered_artifact() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    run_doc(dicke_config(4, "dicke-analytic", json!({"fock": 0}), 1.0, 10), &out);
    assert!(validate_run(&out).is_ok());
    let path = out.join("dicke_fidelity.csv");
    let text = fs::read_to_string(&path).unwrap().replacen("0.0,", "NaN,", 1);
    fs::write(&path, text).unwrap();
    assert!(validate_run(&out).is_err());
    let status = fidelab(&["validate", out.to_str().unwrap()]).status;
    assert_eq!(status.code(), Some(1));
}
