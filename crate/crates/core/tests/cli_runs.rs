use std::path::Path;
use std::process::{Command, Output};

use magic_purify::cli::{parse_grid, run, EXIT_CERTIFICATE, EXIT_CONFIG, EXIT_OK};
use magic_purify::purification::haar_random_state;
use magic_purify::Ensemble;
use num_complex::Complex64;
use rand::SeedableRng;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magic-purify"))
        .args(args)
        .env("PURIFY_THREADS", "1")
        .output()
        .unwrap()
}

fn records(stdout: &[u8]) -> Vec<Value> {
    String::from_utf8_lossy(stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn write_states(dir: &Path, name: &str, d: usize, states: Vec<Vec<Complex64>>) -> String {
    let path = dir.join(name);
    Ensemble::discrete(d, states).unwrap().save(&path).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn grid_parsing() {
    assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
    let g = parse_grid("0:0.99:21").unwrap();
    assert_eq!(g.len(), 21);
    assert_eq!(g[20], 0.99);
    assert!(parse_grid("0:1").is_err());
    assert!(parse_grid("a:1:3").is_err());
}

#[test]
fn universal_record_fields() {
    let out = bin(&["universal", "--d", "2", "--copies", "2", "--class", "cspo", "--delta", "0.5", "--p", "1.0"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let recs = records(&out.stdout);
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert!((r["fidelity"].as_f64().unwrap() - 0.75).abs() < 1e-6);
    assert_eq!(r["class"], "cspo");
    assert_eq!(r["status"], "optimal");
    for key in ["d", "n", "delta", "p", "ensemble", "baseline", "gap_to_baseline", "solver_gap", "iterations", "seconds"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    let out = bin(&["universal", "--d", "3", "--copies", "2", "--class", "cptn", "--delta", "0.0", "--p", "1.0"]);
    assert!((records(&out.stdout)[0]["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn sweeps_are_deterministic_and_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let csv = csv_path.to_str().unwrap();
    let args = ["universal", "--d", "2", "--class", "cspo", "--delta-grid", "0.1:0.9:3", "--p", "0.5,1.0", "--csv", csv];
    let first = bin(&args);
    assert_eq!(first.status.code(), Some(EXIT_OK));
    let second = bin(&args);
    let strip = |mut v: Vec<Value>| {
        for r in &mut v {
            r.as_object_mut().unwrap().remove("seconds");
        }
        v
    };
    let (a, b) = (strip(records(&first.stdout)), strip(records(&second.stdout)));
    assert_eq!(a.len(), 6);
    assert_eq!(a, b);
    let deltas: Vec<f64> = a.iter().map(|r| r["delta"].as_f64().unwrap()).collect();
    assert_eq!(deltas, vec![0.1, 0.1, 0.5, 0.5, 0.9, 0.9]);
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "d,n,delta,p,class,ensemble,fidelity,baseline,gap_to_baseline,solver_gap,status,iterations,seconds"
    );
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn ensemble_comparison_and_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let states: Vec<Vec<Complex64>> = (0..4).map(|_| haar_random_state(3, &mut rng)).collect();
    let path = write_states(dir.path(), "qutrits.json", 3, states.clone());
    let back = Ensemble::load(Path::new(&path)).unwrap();
    let Ensemble::Discrete { states: loaded, .. } = back else { panic!("discrete") };
    for (s, l) in states.iter().zip(&loaded) {
        for (x, y) in s.iter().zip(l) {
            assert!((x - y).norm() <= 1e-15);
        }
    }

    let out = bin(&["ensemble", "--ensemble", "fig2-qutrit", "--class", "cpwp", "--compare", "--delta", "0.5", "--p", "0.6"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let recs = records(&out.stdout);
    let get = |class: &str| {
        recs.iter().find(|r| r["class"] == class).unwrap()["fidelity"].as_f64().unwrap()
    };
    assert!(get("cptn") > get("cpwp") + 1e-3);
}

#[test]
fn malformed_ensemble_names_the_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"d": 2, "states": [[[1.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [1.0, 0.0]]]}"#).unwrap();
    let out = bin(&["ensemble", "--ensemble", path.to_str().unwrap(), "--class", "cptn", "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("state 1"));
}

#[test]
fn certify_exit_codes() {
    assert_eq!(run(["magic-purify", "certify", "--theorem", "cspo", "--grid", "21", "--quiet"]), EXIT_OK);
    assert_eq!(run(["magic-purify", "certify", "--theorem", "cpwp", "--d", "5", "--grid", "11", "--quiet"]), EXIT_OK);
    assert_eq!(run(["magic-purify", "certify", "--theorem", "cpwp", "--d", "4"]), EXIT_CONFIG);
    assert_eq!(run(["magic-purify", "universal", "--bogus"]), EXIT_CONFIG);
    assert_eq!(run(["magic-purify", "universal", "--d", "2", "--class", "cpwp", "--delta", "0.5"]), EXIT_CONFIG);
    assert_eq!(run(["magic-purify", "--help"]), EXIT_OK);
    assert_ne!(EXIT_CERTIFICATE, EXIT_OK);
}

#[test]
fn tools() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write_states(dir.path(), "zero.json", 2, vec![vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]]);
    let out = bin(&["robustness", "--state", &zero]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["robustness"].as_f64().unwrap() - 1.0).abs() < 1e-8);

    let stab = dir.path().join("stab2.txt");
    let out = bin(&["enumerate-stab", "--qubits", "2", "--out", stab.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = std::fs::read_to_string(&stab).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 60);

    let basis: Vec<Vec<Complex64>> = (0..3)
        .map(|k| (0..3).map(|i| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let mixed = write_states(dir.path(), "mixed.json", 3, basis);
    let out = bin(&["wigner", "--state", &mixed, "--d", "3"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let lines: Vec<f64> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect();
    assert_eq!(lines.len(), 9);
    assert!(lines.iter().all(|v| (v - 1.0 / 9.0).abs() < 1e-12));

    let dump = dir.path().join("d3.conic");
    let out = bin(&["dump", "--d", "3", "--copies", "2", "--class", "cpwp", "--delta", "0.3", "--p", "0.5", "--full", "--out", dump.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let problem = magic_purify::sdp::ConicProblem::parse(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(problem.inequalities.len(), 729);
}
