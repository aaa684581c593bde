use std::path::Path;
use std::process::{Command, Output};

use autog::automodel::ModelParams;
use autog::gibbs::{run_chain_blockwise, ChainSettings, TreatmentMode, DEFAULT_BLOCK_SWEEPS};
use autog::io::{format_node_csv, parse_node_csv};
use autog::netgraph::parse_edge_list;
use autog::oracle::PATH3_FIXTURE;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autog")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn graph_and_data(dir: &Path) {
    ok(dir, &["gen-graph", "--n", "120", "--density", "low", "--seed", "3", "--out", "g.txt"]);
    ok(dir, &["simulate", "--graph", "g.txt", "--sweeps", "300", "--burn-in", "200", "--seed", "4", "--out", "d.csv"]);
}

#[test]
fn simulate_writes_the_last_retained_sweep() {
    let d = tempfile::tempdir().unwrap();
    graph_and_data(d.path());
    let text = std::fs::read_to_string(d.path().join("d.csv")).unwrap();
    let parsed = parse_node_csv(&text).unwrap();
    assert_eq!(format_node_csv(&parsed), text);

    let g = parse_edge_list(&std::fs::read_to_string(d.path().join("g.txt")).unwrap(), None).unwrap();
    let m = ModelParams::baseline();
    let expected = run_chain_blockwise(
        &g,
        &m.tau_l,
        &m.tau_y,
        &TreatmentMode::Model(m.tau_a.clone().unwrap()),
        &ChainSettings::new(300, 200, 3, 4).unwrap(),
        DEFAULT_BLOCK_SWEEPS,
    )
    .unwrap()
    .pop()
    .unwrap();
    assert_eq!(parsed, expected);
}

#[test]
fn gen_graph_summary_and_determinism() {
    let d = tempfile::tempdir().unwrap();
    let a = ok(d.path(), &["gen-graph", "--n", "90", "--min-deg", "2", "--max-deg", "3", "--seed", "8", "--out", "a.txt"]);
    let b = ok(d.path(), &["gen-graph", "--n", "90", "--min-deg", "2", "--max-deg", "3", "--seed", "8", "--out", "b.txt"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(d.path().join("a.txt")).unwrap(), std::fs::read(d.path().join("b.txt")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 8);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    let r = &v["result"];
    assert_eq!(r["n_units"], 90);
    assert!(r["stable_set_size"].as_f64().unwrap() >= r["brooks_lower_bound"].as_f64().unwrap());
    assert!(r["max_degree"].as_u64().unwrap() <= 3);
}

#[test]
fn pseudo_likelihood_fit_has_no_covariance() {
    let d = tempfile::tempdir().unwrap();
    graph_and_data(d.path());
    let out = ok(d.path(), &["fit", "--graph", "g.txt", "--data", "d.csv", "--estimator", "pl", "--out", "pl"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bootstrap"));
    let v = json(&d.path().join("pl/outcome.json"));
    assert!(v["result"].get("covariance").is_none_or(|c| c.is_null()));
    assert_eq!(v["result"]["estimator"], "pl");

    ok(d.path(), &["fit", "--graph", "g.txt", "--data", "d.csv", "--out", "coding"]);
    let v = json(&d.path().join("coding/outcome.json"));
    assert_eq!(v["result"]["covariance"].as_array().unwrap().len(), 10);

    let bad = run(d.path(), &["effects", "--graph", "g.txt", "--params", "pl/model.json", "--uncertainty", "normal", "--fit", "pl", "--out", "e"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn zero_allocation_spillover_is_exactly_zero() {
    let d = tempfile::tempdir().unwrap();
    graph_and_data(d.path());
    for mode in ["rao-blackwell", "exact-clamp"] {
        ok(
            d.path(),
            &["effects", "--graph", "g.txt", "--params", "baseline", "--alpha", "0", "--mode", mode, "--draws", "2", "--sweeps", "10", "--out", mode],
        );
        let v = json(&d.path().join(mode).join("effects.json"));
        assert_eq!(v["result"]["spillover"].as_f64(), Some(0.0));
    }
}

#[test]
fn oracle_reproduces_the_path_fixture() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("p.txt"), "0 1\n1 2\n").unwrap();
    let out = ok(d.path(), &["oracle", "--graph", "p.txt", "--alpha", "0.7", "--treatment", "1,0,1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &v["result"];
    let means: Vec<f64> = r["unit_means"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (x, y) in means.iter().zip(&PATH3_FIXTURE[..3]) {
        assert!((x - y).abs() < 1e-12);
    }
    assert!((r["beta_alpha"].as_f64().unwrap() - PATH3_FIXTURE[3]).abs() < 1e-12);
    assert!((r["direct"].as_f64().unwrap() - PATH3_FIXTURE[4]).abs() < 1e-12);
    assert!((r["spillover"].as_f64().unwrap() - PATH3_FIXTURE[5]).abs() < 1e-12);
}

#[test]
fn params_may_be_toml() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("p.txt"), "0 1\n").unwrap();
    let m = ModelParams::baseline();
    let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
    std::fs::write(d.path().join("m.toml"), toml::to_string(&v).unwrap()).unwrap();
    std::fs::write(d.path().join("m.json"), m.to_json()).unwrap();
    let a = ok(d.path(), &["oracle", "--graph", "p.txt", "--params", "m.toml"]);
    let b = ok(d.path(), &["oracle", "--graph", "p.txt", "--params", "m.json"]);
    let c = ok(d.path(), &["oracle", "--graph", "p.txt"]);
    let res = |o: &Output| serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()["result"].clone();
    assert_eq!(res(&a), res(&b));
    assert_eq!(res(&a), res(&c));
}

#[test]
fn study_writes_reports_and_honours_config_files() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("cfg.toml"), "n_units = 100\nreplicates = 3\nbootstrap_replicates = 4\ntruth_draws = 3\n").unwrap();
    ok(d.path(), &["reproduce-study", "--preset", "sharp-null", "--config", "cfg.toml", "--replicates", "2", "--out", "s"]);
    let v = json(&d.path().join("s/report.json"));
    assert_eq!(v["result"]["n_units"], 100);
    assert_eq!(v["result"]["replicates"], 2);
    let csv = std::fs::read_to_string(d.path().join("s/replicates.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2);
    assert!(std::fs::read_to_string(d.path().join("s/report.txt")).unwrap().contains("coverage"));
}

#[test]
fn input_errors_exit_with_two() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("g.txt"), "0 1\n1 2\n").unwrap();
    std::fs::write(d.path().join("bad.csv"), "unit,A,Y\n0,1,7\n").unwrap();
    std::fs::write(d.path().join("self.txt"), "0 0\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["fit", "--graph", "missing.txt", "--data", "bad.csv", "--out", "f"],
        vec!["fit", "--graph", "g.txt", "--data", "bad.csv", "--out", "f"],
        vec!["oracle", "--graph", "self.txt"],
        vec!["oracle", "--graph", "g.txt", "--alpha", "1.5"],
        vec!["oracle", "--graph", "g.txt", "--treatment", "1,0"],
        vec!["gen-graph", "--n", "3", "--min-deg", "5", "--max-deg", "6", "--out", "x.txt"],
        vec!["gen-graph", "--n", "10", "--out", "x.txt"],
        vec!["effects", "--graph", "g.txt", "--params", "baseline", "--uncertainty", "bootstrap", "--out", "e"],
        vec!["no-such-command"],
    ];
    for args in cases {
        let out = run(d.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn oracle_cap_is_an_input_error() {
    let d = tempfile::tempdir().unwrap();
    let edges: String = (0..19).map(|i| format!("{i} {}\n", i + 1)).collect();
    std::fs::write(d.path().join("long.txt"), edges).unwrap();
    let out = run(d.path(), &["oracle", "--graph", "long.txt"]);
    assert_eq!(out.status.code(), Some(2));
}
