use std::path::Path;
use std::process::{Command, Output};

use dcae_cli::config::{parse_config, ConfigFlags};
use dcae_cli::output::write_trials;
use dcae_core::{run_trials, Execution, TrialSummary};

const SMALL: [&str; 14] = [
    "--iterations", "25", "--n", "12", "--m", "3", "--k-range", "0,5", "--q-max", "5", "--p-range",
    "1,10", "--copies-range", "5,15",
];

fn dcae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcae"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--output-dir", dir.to_str().unwrap()]);
    dcae(&all)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

#[test]
fn trial_csv_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["trial", "--trials", "4", "--seed", "7"];
    args.extend(SMALL);
    let out = run_in(dir.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let produced = std::fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    assert_eq!(produced, golden("trials.csv"));
}

#[test]
fn sweep_csv_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "--axis", "epsilon", "--values", "0.2,1", "--trials", "3", "--seed", "7"];
    args.extend(SMALL);
    let out = run_in(dir.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let produced = std::fs::read_to_string(dir.path().join("sweep_epsilon.csv")).unwrap();
    assert_eq!(produced, golden("sweep_epsilon.csv"));
}

#[test]
fn fig2_demo_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["fig2-demo"]);
    assert!(out.status.success());
    let produced = std::fs::read_to_string(dir.path().join("fig2_demo.csv")).unwrap();
    assert_eq!(produced, golden("fig2_demo.csv"));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("fig2_demo.csv"));
}

#[test]
fn epsilon_sweep_has_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "--axis", "epsilon", "--values", "0.2,0.4,0.6,0.8,1.0", "--trials", "2"];
    args.extend(SMALL);
    let out = run_in(dir.path(), &args);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("sweep_epsilon.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    let axis: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(axis, ["0.2", "0.4", "0.6", "0.8", "1"]);
}

#[test]
fn seed_and_outputs_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["trial", "--trials", "1", "--seed", "1234"];
    args.extend(SMALL);
    let out = run_in(dir.path(), &args);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("seed = 1234"), "{stderr}");
    assert!(stderr.contains("trials.csv"), "{stderr}");
}

#[test]
fn dp_check_reports_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["dp-check", "--epsilon", "0.2", "--pairs", "100"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let max_ratio: f64 = stdout
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix("max_ratio="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(max_ratio <= 1.2215, "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("dp_check.csv")).unwrap();
    assert_eq!(csv.lines().count(), 101);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // bad config value
    assert_eq!(run_in(dir.path(), &["trial", "--epsilon", "0"]).status.code(), Some(2));
    // unknown flag
    assert_eq!(dcae(&["trial", "--bogus"]).status.code(), Some(2));
    // unknown config key
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "epsilon = 0.5\nbudget = 3\n").unwrap();
    let out = run_in(dir.path(), &["trial", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    // missing config file
    assert_eq!(dcae(&["trial", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));
    // bad sweep axis
    assert_eq!(run_in(dir.path(), &["sweep", "--axis", "n", "--values", "1"]).status.code(), Some(2));
    // unwritable output directory
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let mut args = vec!["trial", "--trials", "1", "--output-dir", blocker.to_str().unwrap()];
    args.extend(SMALL);
    assert_eq!(dcae(&args).status.code(), Some(3));
}

#[test]
fn config_file_values_are_used() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "scenario = \"competitive\"\nm = 5\ntrials = 7\n").unwrap();
    let flags = ConfigFlags {
        config: Some(cfg),
        trials: Some(9),
        ..Default::default()
    };
    let run = parse_config(&flags).unwrap();
    assert_eq!(run.scenario.copies, dcae_core::CopiesSpec::CompetitiveOne);
    assert_eq!(run.scenario.m, 5);
    assert_eq!(run.trials, 9);
}

#[test]
fn trial_csv_round_trips_means() {
    let run = parse_config(&ConfigFlags {
        iterations: Some(50),
        ..Default::default()
    })
    .unwrap();
    let trials = run_trials(&run.scenario, &run.mechanism, 0, 20, Execution::Parallel).unwrap();
    let mut buf = Vec::new();
    write_trials(&mut buf, &trials, run.scenario.seed).unwrap();

    let mut reader = csv::Reader::from_reader(buf.as_slice());
    let rows: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), trials.len());
    let column = |i: usize| rows.iter().map(|r| r[i].parse::<f64>().unwrap()).collect::<Vec<_>>();
    let mean = |xs: Vec<f64>| dcae_core::stats::mean(&xs);

    let s = TrialSummary::from_trials(&trials);
    assert_eq!(mean(column(1)), s.mean_dcae_revenue);
    assert_eq!(mean(column(2)), s.mean_random_revenue);
    assert_eq!(mean(column(3)), s.mean_best_revenue);
    assert_eq!(mean(column(4)), s.mean_min_revenue);
    let six = |x: f64| format!("{x:.6}");
    assert_eq!(six(mean(column(5))), six(s.mean_dcae_satisfaction));
    assert_eq!(six(mean(column(6))), six(s.mean_random_satisfaction));
    assert_eq!(six(mean(column(7))), six(s.mean_best_satisfaction));
}
