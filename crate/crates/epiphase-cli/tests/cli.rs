//! End-to-end tests of the command-line surface: exit codes, schemas,
//! determinism, and config precedence.

use std::io::Write;
use std::process::{Command, Output};

fn epiphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epiphase"))
        .args(args)
        .env_remove("EPIPHASE_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn verify_passes_on_supported_dimensions() {
    for d in ["2", "3"] {
        let out = epiphase(&["verify", "--d", d, "--trials", "25", "--seed", "7"]);
        assert_eq!(out.status.code(), Some(0), "d={d}: {}", stderr(&out));
        assert!(stdout(&out).contains("overall: PASS"));
    }
}

#[test]
fn verify_rejects_nonprime_dimension() {
    let out = epiphase(&["verify", "--d", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not prime"));
}

#[test]
fn verify_json_output_is_deterministic() {
    let args = ["verify", "--d", "2", "--trials", "10", "--seed", "3", "--output", "json"];
    let first = epiphase(&args);
    let second = epiphase(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "identical config and seed must be byte-identical");

    let report: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["seed"], 3);
    assert_eq!(report["pass"], true);
}

#[test]
fn tolerance_precedence_flags_over_env_over_file() {
    // an absurdly tight tolerance from the environment makes verification fail
    let out = Command::new(env!("CARGO_BIN_EXE_epiphase"))
        .args(["verify", "--d", "2", "--trials", "10", "--seed", "1"])
        .env("EPIPHASE_TOL", "1e-18")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "verification failure exits 1");
    assert!(stdout(&out).contains("overall: FAIL"));

    // an explicit flag overrides the environment
    let out = Command::new(env!("CARGO_BIN_EXE_epiphase"))
        .args(["verify", "--d", "2", "--trials", "10", "--seed", "1", "--tol", "1e-9"])
        .env("EPIPHASE_TOL", "1e-18")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    // config file supplies the dimension when no flag does
    let mut config = tempfile::NamedTempFile::new().unwrap();
    write!(config, r#"{{"schema": 1, "dimension": 3, "trials": 10}}"#).unwrap();
    let out = epiphase(&["verify", "--seed", "2", "--config", config.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("d=3"));
}

#[test]
fn enumerate_subgroups_and_frameworks() {
    let out = epiphase(&["enumerate", "--d", "2", "--what", "subgroups"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("1 nonsingular-difference subgroup(s) of order 3"));
    assert!(text.contains("[[0,1],[1,1]]") && text.contains("[[1,1],[1,0]]"));

    let out = epiphase(&["enumerate", "--d", "3", "--what", "frameworks"]);
    assert!(stdout(&out).contains("32 coherent frameworks"));

    let out = epiphase(&["enumerate", "--d", "2", "--what", "frameworks", "--chain-len", "0"]);
    assert!(stdout(&out).contains("3 coherent frameworks"));
}

#[test]
fn enumerate_qubit_sets_as_json() {
    let out =
        epiphase(&["enumerate", "--d", "2", "--what", "qubit-rotations", "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["count"], 12);
    assert_eq!(report["elements"].as_array().unwrap().len(), 12);
    for element in report["elements"].as_array().unwrap() {
        assert!((element["det"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!(element["quaternion"].is_array());
    }

    let out =
        epiphase(&["enumerate", "--d", "2", "--what", "qubit-permutations", "--output", "json"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["count"], 24);
    let dets: Vec<f64> = report["elements"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["det"].as_f64().unwrap())
        .collect();
    assert_eq!(dets.iter().filter(|d| **d > 0.0).count(), 12);
    assert_eq!(dets.iter().filter(|d| **d < 0.0).count(), 12);

    // the qubit listings require d = 2
    let out = epiphase(&["enumerate", "--d", "3", "--what", "qubit-rotations"]);
    assert_eq!(out.status.code(), Some(2));
}

fn spin_up_experiment() -> serde_json::Value {
    serde_json::json!({
        "schema": 1,
        "dimension": 2,
        "density": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
        "channels": [
            {"kraus": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]}
        ],
        "povm_element": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
    })
}

#[test]
fn decompose_reproduces_spin_up_tables() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{}", spin_up_experiment()).unwrap();
    let out = epiphase(&[
        "decompose",
        "--in",
        file.path().to_str().unwrap(),
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();

    // striations X and Y are uniform 1/4; Z holds 1/2 on the alpha_q = 0
    // points (indices 0 and 1 in row-major point order)
    let prep = report["preparation"].as_array().unwrap();
    for table in &prep[..2] {
        for v in table["values"].as_array().unwrap() {
            assert!((v.as_f64().unwrap() - 0.25).abs() < 1e-12);
        }
    }
    let z: Vec<f64> =
        prep[2]["values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(z.len(), 4);
    assert!((z[0] - 0.5).abs() < 1e-12 && (z[1] - 0.5).abs() < 1e-12);
    assert!(z[2].abs() < 1e-12 && z[3].abs() < 1e-12);

    // identity channel: R^I = delta class table, R^R = R^L = 1/4
    let family = report["chain"].as_array().unwrap()[0].as_array().unwrap();
    for table in family {
        let class: Vec<f64> = table["class_values"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        if table["symplectic"] == serde_json::json!([1, 0, 0, 1]) {
            assert!((class[0] - 1.0).abs() < 1e-12);
            assert!(class[1..].iter().all(|v| v.abs() < 1e-12));
        } else {
            assert!(class.iter().all(|v| (v - 0.25).abs() < 1e-12));
        }
    }

    let prob = &report["probability"];
    assert!((prob["reconstructed"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(prob["deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(report["purity"]["pass"], true);
}

#[test]
fn decompose_rejects_invalid_operators() {
    // non-unital amplitude damping channel
    let gamma: f64 = 0.4;
    let mut doc = spin_up_experiment();
    doc["channels"] = serde_json::json!([
        {"kraus": [
            [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [(1.0 - gamma).sqrt(), 0.0]]],
            [[[0.0, 0.0], [gamma.sqrt(), 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
        ]}
    ]);
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{doc}").unwrap();
    let out = epiphase(&["decompose", "--in", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unital"));

    // non-positive density
    let mut doc = spin_up_experiment();
    doc["density"] = serde_json::json!([
        [[1.5, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [-0.5, 0.0]]
    ]);
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{doc}").unwrap();
    let out = epiphase(&["decompose", "--in", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("negative eigenvalue"));
}

#[test]
fn decompose_random_experiment_round_trips() {
    // a rotated preparation measured in the computational basis: the
    // reconstruction must meet the oracle
    let c = std::f64::consts::FRAC_PI_8.cos();
    let s = std::f64::consts::FRAC_PI_8.sin();
    let doc = serde_json::json!({
        "schema": 1,
        "dimension": 2,
        "density": [[[0.7, 0.0], [0.1, 0.2]], [[0.1, -0.2], [0.3, 0.0]]],
        "channels": [
            {"kraus": [[[[c, 0.0], [-s, 0.0]], [[s, 0.0], [c, 0.0]]]]}
        ],
        "povm_element": [[[0.8, 0.0], [0.0, 0.1]], [[0.0, -0.1], [0.4, 0.0]]]
    });
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{doc}").unwrap();
    let out = epiphase(&[
        "decompose",
        "--in",
        file.path().to_str().unwrap(),
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["probability"]["deviation"].as_f64().unwrap() < 1e-9);
}
