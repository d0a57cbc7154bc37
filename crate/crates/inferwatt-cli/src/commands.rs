//! Command implementations. Everything returns rendered documents so the
//! binary stays a thin dispatcher and tests can compare outputs byte for
//! byte.

use std::fmt;
use std::path::{Path, PathBuf};

use inferwatt::benchmark_data::{
    model_names, parse_benchmarks, records_for_model, BenchmarkRecord,
};
use inferwatt::energy_model::NodeSpec;
use inferwatt::fleet::{compute_beta, daily_energy};
use inferwatt::report::{
    fit_csv, fit_document, fleet_line, histogram_to_csv, log_histogram, samples_to_csv, sig6,
    summary_csv_header, summary_csv_row, summary_text,
};
use inferwatt::rng::RngState;
use inferwatt::scenario::{
    mix_regimes, run_scenario, summarize, AlphaSpec, OutputLengthDist, QuerySample,
    ScenarioMember, ScenarioSpec, WorkloadSpec,
};
use inferwatt::tps_model::{fit_all, fit_log_linear, TpsModel};

use crate::config::{FormatConfig, RunConfig};

/// Failure classes mapped to exit codes: usage/config errors exit 1, data
/// errors exit 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// A parsed, validated config plus the directory its paths resolve against.
pub struct LoadedConfig {
    pub config: RunConfig,
    pub dir: PathBuf,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read `{}`: {e}", path.display())))?;
    let config = RunConfig::from_toml(&text)
        .map_err(|e| CliError::Config(format!("`{}`: {e}", path.display())))?;
    config
        .validate()
        .map_err(|problems| CliError::Config(problems.join("\n  ")))?;
    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    Ok(LoadedConfig { config, dir })
}

fn read_benchmark_text(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        None => Ok(inferwatt::benchmark_data::BUILTIN_CSV.to_string()),
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Data(format!("cannot read `{}`: {e}", p.display()))),
    }
}

fn load_records(loaded: &LoadedConfig) -> Result<Vec<BenchmarkRecord>, CliError> {
    let path = loaded
        .config
        .benchmark
        .path
        .as_ref()
        .map(|p| RunConfig::resolve(&loaded.dir, p));
    let text = read_benchmark_text(path.as_deref())?;
    parse_benchmarks(&text).map_err(|e| CliError::Data(e.to_string()))
}

fn member_for_model(records: &[BenchmarkRecord], name: &str) -> Result<ScenarioMember, CliError> {
    let rows = records_for_model(records, name);
    let first = rows
        .first()
        .ok_or_else(|| CliError::Data(format!("unknown model `{name}`")))?;
    let node = NodeSpec::h100(first.tp_size);
    let tps = fit_log_linear(&rows).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(ScenarioMember { node, tps })
}

/// Assemble the core scenario spec from the config (plus optional seed
/// override and a workload override used by the fleet command).
pub fn build_scenario(
    loaded: &LoadedConfig,
    records: &[BenchmarkRecord],
    seed_override: Option<u64>,
) -> Result<ScenarioSpec, CliError> {
    let s = &loaded.config.scenario;
    let members = s
        .models
        .iter()
        .map(|name| member_for_model(records, name))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScenarioSpec {
        members,
        workload: WorkloadSpec {
            regime_name: s.name.clone(),
            l_in: s.l_in,
            l_out: OutputLengthDist::Exponential { median_tokens: s.l_out_median },
            l_eff_mode: s.l_eff_mode.to_core(),
        },
        pue_p5: s.pue_p5,
        pue_p95: s.pue_p95,
        power_mode: s.power_mode.to_core(),
        power_p5_frac: s.power_p5_frac,
        power_p95_frac: s.power_p95_frac,
        power_center_mode: s.power_center_mode.to_core(),
        alphas: s
            .alphas
            .iter()
            .map(|a| AlphaSpec {
                category: a.category.to_core(),
                p5: a.p5,
                p95: a.p95,
                enabled: a.enabled,
            })
            .collect(),
        n_samples: s.n_samples,
        seed: seed_override.unwrap_or(s.seed),
    })
}

/// Fit models from a benchmark file (or the embedded table) and render the
/// fitted-model document.
pub fn cmd_fit(
    benchmark_path: Option<&Path>,
    model_filter: Option<&str>,
    format: FormatConfig,
) -> Result<String, CliError> {
    let text = read_benchmark_text(benchmark_path)?;
    let records = parse_benchmarks(&text).map_err(|e| CliError::Data(e.to_string()))?;
    let models: Vec<TpsModel> = match model_filter {
        Some(name) => {
            let rows = records_for_model(&records, name);
            if rows.is_empty() {
                let known = model_names(&records).join("`, `");
                return Err(CliError::Data(format!(
                    "unknown model `{name}`; dataset has `{known}`"
                )));
            }
            vec![fit_log_linear(&rows).map_err(|e| CliError::Data(e.to_string()))?]
        }
        None => fit_all(&records).map_err(|e| CliError::Data(e.to_string()))?,
    };
    Ok(match format {
        FormatConfig::Text => fit_document(&models),
        FormatConfig::Csv => fit_csv(&models),
    })
}

/// Everything a simulate run produces.
pub struct SimulateArtifacts {
    pub report: String,
    pub samples_csv: String,
    pub histogram_csv: String,
    pub samples: Vec<QuerySample>,
}

fn summaries_section(
    spec: &ScenarioSpec,
    samples: &[QuerySample],
    format: FormatConfig,
    out: &mut String,
) {
    let pooled = summarize(samples).expect("non-empty run");
    let mut blocks: Vec<(String, inferwatt::scenario::DistributionSummary)> = Vec::new();
    if spec.members.len() > 1 {
        for member in &spec.members {
            let subset: Vec<f64> = samples
                .iter()
                .filter(|s| s.model_name == member.model_name())
                .map(|s| s.energy_wh)
                .collect();
            if let Ok(summary) = inferwatt::scenario::summarize_values(&subset) {
                blocks.push((member.model_name().to_string(), summary));
            }
        }
    }
    blocks.push(("pooled".to_string(), pooled));

    match format {
        FormatConfig::Text => {
            for (label, summary) in &blocks {
                out.push_str(&summary_text(label, summary));
            }
        }
        FormatConfig::Csv => {
            out.push_str(summary_csv_header());
            out.push('\n');
            for (label, summary) in &blocks {
                out.push_str(&summary_csv_row(label, summary));
                out.push('\n');
            }
        }
    }
}

/// Run the configured scenario: per-member and pooled summaries plus the
/// sample and histogram CSVs. Member summaries are the pooled run grouped
/// by model, so every reported number re-derives from the sample CSV.
pub fn cmd_simulate(
    loaded: &LoadedConfig,
    seed_override: Option<u64>,
    format_override: Option<FormatConfig>,
) -> Result<SimulateArtifacts, CliError> {
    let records = load_records(loaded)?;
    let spec = build_scenario(loaded, &records, seed_override)?;
    let format = format_override.unwrap_or(loaded.config.output.format);

    let (samples, _) = run_scenario(&spec).map_err(|e| CliError::Data(e.to_string()))?;

    let mut report = format!("scenario: {}\n", spec.workload.regime_name);
    summaries_section(&spec, &samples, format, &mut report);

    if let Some(levers) = &loaded.config.levers {
        if levers.sweep {
            report.push_str(&lever_sweep_section(&spec, &samples, format)?);
        }
    }

    let energies: Vec<f64> = samples.iter().map(|s| s.energy_wh).collect();
    let histogram = log_histogram(&energies, loaded.config.output.histogram_bins)
        .map_err(|e| CliError::Data(e.to_string()))?;

    Ok(SimulateArtifacts {
        report,
        samples_csv: samples_to_csv(&samples),
        histogram_csv: histogram_to_csv(&histogram),
        samples,
    })
}

/// One run per alpha category with only that lever enabled, at the baseline
/// seed (matched workload draws), reporting median reductions.
fn lever_sweep_section(
    spec: &ScenarioSpec,
    baseline: &[QuerySample],
    format: FormatConfig,
) -> Result<String, CliError> {
    let base_median = summarize(baseline)
        .map_err(|e| CliError::Data(e.to_string()))?
        .median_wh;
    let mut out = String::from(match format {
        FormatConfig::Text => "lever sweep (matched seed)\n",
        FormatConfig::Csv => "lever,p5,p95,median_wh,reduction\n",
    });
    for lever in &spec.alphas {
        let mut levered = spec.clone();
        for l in &mut levered.alphas {
            l.enabled = l.category == lever.category;
        }
        let (_, summary) = run_scenario(&levered).map_err(|e| CliError::Data(e.to_string()))?;
        let reduction = base_median / summary.median_wh;
        match format {
            FormatConfig::Text => out.push_str(&format!(
                "  lever: {} [{}, {}]  median_wh: {}  reduction: {}\n",
                lever.category.name(),
                sig6(lever.p5),
                sig6(lever.p95),
                sig6(summary.median_wh),
                sig6(reduction)
            )),
            FormatConfig::Csv => out.push_str(&format!(
                "{},{},{},{},{}\n",
                lever.category.name(),
                sig6(lever.p5),
                sig6(lever.p95),
                sig6(summary.median_wh),
                sig6(reduction)
            )),
        }
    }
    Ok(out)
}

/// Fleet extrapolation: baseline scenario, optional 90/10-style mix, and
/// optional improved-alpha variant, each as daily GWh.
pub fn cmd_fleet(loaded: &LoadedConfig, seed_override: Option<u64>) -> Result<String, CliError> {
    let fleet = loaded
        .config
        .fleet
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [fleet] section".to_string()))?;
    let records = load_records(loaded)?;
    let spec = build_scenario(loaded, &records, seed_override)?;

    let beta = match fleet.beta {
        Some(beta) => beta,
        None => {
            let components = fleet
                .beta_components
                .as_ref()
                .map(|c| c.to_core())
                .unwrap_or_default();
            compute_beta(&components).map_err(|e| CliError::Data(e.to_string()))?
        }
    };
    let queries = fleet.queries_per_day;

    let (base_samples, base_summary) =
        run_scenario(&spec).map_err(|e| CliError::Data(e.to_string()))?;

    let mut out = String::from("fleet\n");
    out.push_str(&fleet_line(
        &format!("baseline ({})", spec.workload.regime_name),
        base_summary.mean_wh,
        queries,
        beta,
        daily_energy(base_summary.mean_wh, queries, beta),
    ));

    if fleet.test_time_fraction > 0.0 {
        let mut tts_spec = spec.clone();
        tts_spec.workload.regime_name = "test-time".to_string();
        tts_spec.workload.l_out = OutputLengthDist::Exponential {
            median_tokens: fleet.test_time_l_out_median,
        };
        let (tts_samples, _) =
            run_scenario(&tts_spec).map_err(|e| CliError::Data(e.to_string()))?;
        let mixed = mix_regimes(
            &[
                (base_samples, 1.0 - fleet.test_time_fraction),
                (tts_samples, fleet.test_time_fraction),
            ],
            &RngState::new(spec.seed),
        )
        .map_err(|e| CliError::Data(e.to_string()))?;
        let mean = summarize(&mixed).map_err(|e| CliError::Data(e.to_string()))?.mean_wh;
        out.push_str(&fleet_line(
            &format!(
                "mixed ({} traditional / {} test-time)",
                sig6(1.0 - fleet.test_time_fraction),
                sig6(fleet.test_time_fraction)
            ),
            mean,
            queries,
            beta,
            daily_energy(mean, queries, beta),
        ));
    }

    if let (Some(p5), Some(p95)) = (fleet.improved_alpha_p5, fleet.improved_alpha_p95) {
        // Improved scenario: the same workload mix with one enabled
        // efficiency lever; workload draws stay matched via the seed.
        let improve = |base: &ScenarioSpec| -> Result<Vec<QuerySample>, CliError> {
            let mut improved = base.clone();
            improved.alphas = vec![AlphaSpec {
                category: inferwatt::scenario::AlphaCategory::Model,
                p5,
                p95,
                enabled: true,
            }];
            Ok(run_scenario(&improved)
                .map_err(|e| CliError::Data(e.to_string()))?
                .0)
        };
        let improved_samples = if fleet.test_time_fraction > 0.0 {
            let mut tts_spec = spec.clone();
            tts_spec.workload.l_out = OutputLengthDist::Exponential {
                median_tokens: fleet.test_time_l_out_median,
            };
            mix_regimes(
                &[
                    (improve(&spec)?, 1.0 - fleet.test_time_fraction),
                    (improve(&tts_spec)?, fleet.test_time_fraction),
                ],
                &RngState::new(spec.seed),
            )
            .map_err(|e| CliError::Data(e.to_string()))?
        } else {
            improve(&spec)?
        };
        let mean = summarize(&improved_samples)
            .map_err(|e| CliError::Data(e.to_string()))?
            .mean_wh;
        out.push_str(&fleet_line(
            &format!("improved (alpha {} - {})", sig6(p5), sig6(p95)),
            mean,
            queries,
            beta,
            daily_energy(mean, queries, beta),
        ));
    }

    Ok(out)
}

/// The full document: fitted models, scenario summaries, histogram, and the
/// fleet table when configured.
pub fn cmd_report(
    loaded: &LoadedConfig,
    seed_override: Option<u64>,
    format_override: Option<FormatConfig>,
) -> Result<ReportArtifacts, CliError> {
    let records = load_records(loaded)?;
    let format = format_override.unwrap_or(loaded.config.output.format);
    let fit_models: Vec<TpsModel> = loaded
        .config
        .scenario
        .models
        .iter()
        .map(|name| member_for_model(&records, name).map(|m| m.tps))
        .collect::<Result<Vec<_>, _>>()?;

    let simulate = cmd_simulate(loaded, seed_override, format_override)?;

    let mut report = String::from("fitted models\n");
    report.push_str(&match format {
        FormatConfig::Text => fit_document(&fit_models),
        FormatConfig::Csv => fit_csv(&fit_models),
    });
    report.push('\n');
    report.push_str(&simulate.report);
    report.push('\n');
    report.push_str("histogram (pooled energy_wh)\n");
    report.push_str(&simulate.histogram_csv);

    if loaded.config.fleet.is_some() {
        report.push('\n');
        report.push_str(&cmd_fleet(loaded, seed_override)?);
    }

    Ok(ReportArtifacts {
        report,
        samples_csv: simulate.samples_csv,
        histogram_csv: simulate.histogram_csv,
    })
}

pub struct ReportArtifacts {
    pub report: String,
    pub samples_csv: String,
    pub histogram_csv: String,
}

/// Write the report artifacts to their configured destinations; returns what
/// should go to stdout (the report when no destination is configured).
pub fn write_artifacts(
    loaded: &LoadedConfig,
    report: &str,
    samples_csv: Option<&str>,
    histogram_csv: Option<&str>,
    samples_out_flag: Option<&Path>,
) -> Result<Option<String>, CliError> {
    let out = &loaded.config.output;
    let write = |path: &Path, data: &str| -> Result<(), CliError> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| {
                    CliError::Config(format!("cannot create `{}`: {e}", parent.display()))
                })?;
            }
        }
        std::fs::write(path, data)
            .map_err(|e| CliError::Config(format!("cannot write `{}`: {e}", path.display())))
    };

    let samples_path = samples_out_flag
        .map(|p| p.to_path_buf())
        .or_else(|| out.samples_path.as_ref().map(|p| RunConfig::resolve(&loaded.dir, p)));
    if let (Some(path), Some(csv)) = (samples_path, samples_csv) {
        write(&path, csv)?;
    }
    if let (Some(path), Some(csv)) = (
        out.histogram_path.as_ref().map(|p| RunConfig::resolve(&loaded.dir, p)),
        histogram_csv,
    ) {
        write(&path, csv)?;
    }
    match &out.destination {
        Some(dest) => {
            write(&RunConfig::resolve(&loaded.dir, dest), report)?;
            Ok(None)
        }
        None => Ok(Some(report.to_string())),
    }
}
