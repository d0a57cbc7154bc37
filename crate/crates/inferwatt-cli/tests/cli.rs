//! Binary-level checks: exit codes, output routing, and run-to-run
//! byte identity.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_inferwatt"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("inferwatt-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn fit_prints_five_models_and_exits_zero() {
    let out = run(&["fit"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // header + 5 model rows
    assert_eq!(text.lines().count(), 6);
    assert!(text.contains("DeepSeek-R1"));
    assert!(text.contains("Mixtral 8x22B"));
}

#[test]
fn fit_single_model_reports_frozen_coefficients() {
    // Regression pin: the 3-point exact fit, six significant figures.
    let out = run(&["fit", "--model", "DeepSeek-R1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains("DeepSeek-R1"));
    for column in ["10.5593", "-0.539388", "-0.00487755", "1300.00"] {
        assert!(row.contains(column), "missing {column} in: {row}");
    }
    assert!(row.trim_end().ends_with('3'), "row = {row}");
}

#[test]
fn fit_unknown_model_is_a_data_error() {
    let out = run(&["fit", "--model", "GPT-7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown model"));
}

#[test]
fn fit_missing_file_is_a_data_error_with_no_partial_output() {
    let out = run(&["fit", "--benchmark", "/nonexistent/benchmarks.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_config_is_a_config_error() {
    let out = run(&["simulate", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_error_exits_one() {
    let out = run(&["simulate"]); // missing --config
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_config_enumerates_every_bad_field() {
    let dir = tempdir("badcfg");
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        r#"
[scenario]
name = ""
models = []
n_samples = 0
pue_p5 = 0.5
"#,
    )
    .unwrap();
    let out = run(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    for needle in ["scenario.name", "scenario.models", "n_samples", "pue_p5"] {
        assert!(err.contains(needle), "missing `{needle}` in: {err}");
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempdir("unknown-key");
    let path = dir.join("unknown.toml");
    std::fs::write(
        &path,
        "[scenario]\nname = \"x\"\nmodels = [\"DeepSeek-R1\"]\ntypo_key = 3\n",
    )
    .unwrap();
    let out = run(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_writes_samples_with_pinned_header() {
    let dir = tempdir("samples");
    let samples = dir.join("samples.csv");
    let out = run(&[
        "simulate",
        "--config",
        repo_config("fig2-baseline-levers.toml").to_str().unwrap(),
        "--seed",
        "7",
        "--samples-out",
        samples.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&samples).unwrap();
    assert!(csv.starts_with("model,l_out,l_eff,tps,p_node_kw,pue,alpha,energy_wh\n"));
    assert_eq!(csv.lines().count(), 10_001);
}

#[test]
fn report_runs_are_byte_identical() {
    let config = repo_config("fig3-fleet.toml");
    let first = run(&["report", "--config", config.to_str().unwrap()]);
    let second = run(&["report", "--config", config.to_str().unwrap()]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    // A different seed must change the document.
    let reseeded = run(&["report", "--config", config.to_str().unwrap(), "--seed", "9"]);
    assert!(reseeded.status.success());
    assert_ne!(first.stdout, reseeded.stdout);
}

#[test]
fn report_csv_format_emits_summary_table() {
    let config = repo_config("fig1-traditional.toml");
    let out = run(&["report", "--config", config.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("member,n,mean_wh,p5_wh,q1_wh,median_wh,q3_wh,p95_wh"));
    assert!(text.contains("pooled,10000,"));
}

#[test]
fn fleet_report_names_three_scenarios() {
    let config = repo_config("fig3-fleet.toml");
    let out = run(&["fleet", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("scenario: baseline"));
    assert!(text.contains("scenario: mixed"));
    assert!(text.contains("scenario: improved"));
    assert!(text.contains("gwh_per_day"));
    assert!(text.contains("beta: 1.33012"));
}
