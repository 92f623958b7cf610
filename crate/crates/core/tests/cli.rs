mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::*;
use markov_loss::decode::{brute_force_mel, decode_markov_loss};
use markov_loss::io::{read_pairwise, write_pairwise};
use markov_loss::loss::{CostSet, LossMatrix};
use markov_loss::sim::benchmark_model;
use tempfile::TempDir;

fn mlhmm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlhmm"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn column(table: &str, name: &str) -> Vec<String> {
    let mut lines = table.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let idx = header
        .iter()
        .position(|h| *h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    lines
        .map(|l| l.split('\t').nth(idx).unwrap().to_string())
        .collect()
}

fn states(table: &str, name: &str) -> Vec<usize> {
    column(table, name)
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const NARROW_MODEL: &str = r#"{
    "initial": [0.5, 0.5],
    "transitions": [[0.9, 0.1], [0.1, 0.9]],
    "emissions": [{"main_mean": 0.0, "main_var": 0.0001}, {"main_mean": 1.0, "main_var": 0.0001}]
}"#;

#[test]
fn decode_recovers_states_from_unambiguous_observations() {
    let dir = TempDir::new().unwrap();
    let truth = [0usize, 0, 1, 1, 1, 0, 1, 0, 0];
    let obs: String = truth.iter().map(|s| format!("{s}.0\n")).collect();
    let obs_path = write(dir.path(), "obs.txt", &obs);
    let cfg = format!(
        r#"{{"model": {NARROW_MODEL}, "loss": {{"costs": {{"fpc":1,"fnc":1,"fpt":1,"fnt":1,"dft":1000}}}}}}"#
    );
    let cfg_path = write(dir.path(), "cfg.json", &cfg);
    let out = mlhmm(dir.path(), &["decode", "--config", &cfg_path, &obs_path]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let positions = fs::read_to_string(dir.path().join("positions.tsv")).unwrap();
    for col in ["viterbi_state", "marginal_state", "markov_state"] {
        assert_eq!(states(&positions, col), truth, "{col}");
    }
    let segments = fs::read_to_string(dir.path().join("segments.tsv")).unwrap();
    assert_eq!(
        segments.lines().next().unwrap(),
        "start\tend\tstate\tmean_posterior"
    );
    assert_eq!(segments.lines().count(), 1 + 5);
}

#[test]
fn marginal_cost_config_makes_markov_match_marginal() {
    let dir = TempDir::new().unwrap();
    let mut rng = rng(31);
    let obs = random_observations(&mut rng, 200, 2);
    let obs_path = write(
        dir.path(),
        "obs.txt",
        &obs.iter().map(|v| format!("{v}\n")).collect::<String>(),
    );
    let model = serde_json::to_string(&benchmark_model()).unwrap();
    let cfg = format!(
        r#"{{"model": {model}, "observations": "{obs_path}",
            "loss": {{"costs": {{"fpc":2.5,"fnc":1,"fpt":0,"fnt":0,"dft":0}}}},
            "marginal": {{"fpc": 2.5, "fnc": 1}}}}"#
    );
    let cfg_path = write(dir.path(), "cfg.json", &cfg);
    let out = mlhmm(dir.path(), &["decode", "--config", &cfg_path]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let positions = fs::read_to_string(dir.path().join("positions.tsv")).unwrap();
    assert_eq!(
        states(&positions, "markov_state")[1..],
        states(&positions, "marginal_state")[1..]
    );
}

#[test]
fn decode_marginals_agrees_with_exhaustive_search() {
    let dir = TempDir::new().unwrap();
    let mut rng = rng(32);
    for trial in 0..10 {
        let post = random_posterior(&mut rng, 7, 3);
        let costs = random_costs(&mut rng);
        let pw = dir.path().join(format!("pw{trial}.tsv"));
        write_pairwise(&pw, &post).unwrap();
        let cfg = format!(
            r#"{{"loss": {{"costs": {}}}}}"#,
            serde_json::to_string(&costs).unwrap()
        );
        let cfg_path = write(dir.path(), "cfg.json", &cfg);
        let out = mlhmm(
            dir.path(),
            &[
                "decode-marginals",
                "--config",
                &cfg_path,
                pw.to_str().unwrap(),
            ],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let positions = fs::read_to_string(dir.path().join("positions.tsv")).unwrap();
        let loss = LossMatrix::multistate(&costs, 3).unwrap();
        let oracle = brute_force_mel(&read_pairwise(&pw).unwrap().marginals, &loss).unwrap();
        let got = states(&positions, "markov_state");
        let got_loss = markov_loss::loss::expected_loss(&got.clone().into(), &post, &loss).unwrap();
        assert!(
            (got_loss - oracle.expected_loss).abs() < 1e-9,
            "trial {trial}"
        );
    }
}

#[test]
fn decode_marginals_round_trip_matches_in_memory_decode() {
    let dir = TempDir::new().unwrap();
    let mut rng = rng(33);
    let post = random_posterior(&mut rng, 300, 2);
    let pw = dir.path().join("pw.tsv");
    write_pairwise(&pw, &post).unwrap();
    let costs = CostSet::new(1.5, 1.0, 0.7, 1.0, 1000.0);
    let cfg_path = write(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{"loss": {{"costs": {}}}}}"#,
            serde_json::to_string(&costs).unwrap()
        ),
    );
    let out = mlhmm(
        dir.path(),
        &[
            "decode-marginals",
            "--config",
            &cfg_path,
            pw.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    let positions = fs::read_to_string(dir.path().join("positions.tsv")).unwrap();
    let direct = decode_markov_loss(&post, &LossMatrix::binary(&costs).unwrap()).unwrap();
    assert_eq!(states(&positions, "markov_state"), direct.path.into_inner());
    assert!(!positions.lines().next().unwrap().contains("viterbi"));
}

#[test]
fn decode_marginals_point_mass_and_uniform() {
    let dir = TempDir::new().unwrap();
    let point = "i\tp_0_0\tp_0_1\tp_1_0\tp_1_1\n1\t0\t1\t0\t0\n2\t0\t0\t0\t1\n3\t0\t0\t1\t0\n";
    let pw = write(dir.path(), "point.tsv", point);
    let out = mlhmm(dir.path(), &["decode-marginals", &pw]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let positions = fs::read_to_string(dir.path().join("positions.tsv")).unwrap();
    assert_eq!(states(&positions, "markov_state"), vec![0, 1, 1, 0]);

    // uniform marginals with costs favouring null calls decode to all zeros
    let uniform = "1\t0.25\t0.25\t0.25\t0.25\n2\t0.25\t0.25\t0.25\t0.25\n";
    let pw = write(dir.path(), "uniform.tsv", uniform);
    let cfg_path = write(
        dir.path(),
        "cfg.json",
        r#"{"loss": {"costs": {"fpc":2,"fnc":1,"fpt":1,"fnt":1,"dft":1000}}}"#,
    );
    let out = mlhmm(
        dir.path(),
        &["decode-marginals", "--config", &cfg_path, &pw],
    );
    assert!(out.status.success());
    let positions = fs::read_to_string(dir.path().join("positions.tsv")).unwrap();
    assert_eq!(states(&positions, "markov_state"), vec![0, 0, 0]);
}

#[test]
fn inconsistent_pairwise_input_exits_with_consistency_code() {
    let dir = TempDir::new().unwrap();
    let pw = write(
        dir.path(),
        "bad.tsv",
        "1\t0.5\t0.5\t0\t0\n2\t0\t0\t0.5\t0.5\n",
    );
    let out = mlhmm(dir.path(), &["decode-marginals", &pw]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("disagree"));
}

#[test]
fn sweep_smoke() {
    let dir = TempDir::new().unwrap();
    let out = mlhmm(
        dir.path(),
        &[
            "sweep",
            "--sequences",
            "1",
            "--length",
            "10",
            "--threads",
            "1",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let width = csv.lines().next().unwrap().split(',').count();
    assert!(csv.lines().all(|l| l.split(',').count() == width));
    assert_eq!(csv.lines().filter(|l| l.starts_with("viterbi,")).count(), 1);
    // the (1, 1) point sits on both axes and appears once
    assert_eq!(csv.lines().count(), 1 + 1 + 13 + 25);
    assert!(dir.path().join("fpc_vs_fnc.tsv").exists());
    assert!(dir.path().join("fpc_vs_fpt.tsv").exists());
}

#[test]
fn simulate_writes_requested_shape() {
    let dir = TempDir::new().unwrap();
    let out = mlhmm(
        dir.path(),
        &[
            "simulate",
            "--sequences",
            "3",
            "--length",
            "25",
            "--seed",
            "7",
        ],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("simulated.tsv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 75);
}

#[test]
fn compare_counts_errors() {
    let dir = TempDir::new().unwrap();
    let t = write(dir.path(), "t.txt", "0\n0\n1\n1\n1\n0\n");
    let p = write(dir.path(), "p.txt", "0\n1\n1\n1\n0\n0\n");
    let out = mlhmm(dir.path(), &["compare", &t, &p]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let get = |k: &str| row[header.iter().position(|h| *h == k).unwrap()];
    assert_eq!(get("fpc_count"), "1");
    assert_eq!(get("fnc_count"), "1");
}

#[test]
fn compare_rejects_length_mismatch() {
    let dir = TempDir::new().unwrap();
    let t = write(dir.path(), "t.txt", "0\n1\n");
    let p = write(dir.path(), "p.txt", "0\n1\n1\n");
    assert_eq!(
        mlhmm(dir.path(), &["compare", &t, &p]).status.code(),
        Some(2)
    );
}

#[test]
fn malformed_observations_report_line_number() {
    let dir = TempDir::new().unwrap();
    let obs = write(dir.path(), "obs.txt", "0.1\n0.2\nnot-a-number\n");
    let cfg = write(
        dir.path(),
        "cfg.json",
        &format!(r#"{{"model": {NARROW_MODEL}}}"#),
    );
    let out = mlhmm(dir.path(), &["decode", "--config", &cfg, &obs]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("obs.txt:3"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"modle": {}}"#);
    let out = mlhmm(dir.path(), &["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("modle"));
}
