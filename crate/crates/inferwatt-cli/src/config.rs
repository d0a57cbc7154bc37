//! Run configuration: one TOML document describing the benchmark source, the
//! scenario, optional lever sweep and fleet extrapolation, and output routing.
//!
//! Unknown keys are rejected. Semantic validation collects every violation
//! so a bad config reports all of its problems at once. Relative paths are
//! resolved against the config file's directory.

use std::path::{Path, PathBuf};

use inferwatt::energy_model::{EffectiveLengthMode, PowerMode};
use inferwatt::fleet::BetaComponents;
use inferwatt::scenario::{AlphaCategory, PowerCenterMode};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub benchmark: BenchmarkSection,
    pub scenario: ScenarioSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levers: Option<LeversSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fleet: Option<FleetSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSection {
    /// Benchmark CSV path; the embedded dataset is used when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: String,
    pub models: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default = "default_l_in")]
    pub l_in: f64,
    #[serde(default = "default_l_out_median")]
    pub l_out_median: f64,
    #[serde(default)]
    pub l_eff_mode: LEffModeConfig,
    #[serde(default)]
    pub power_mode: PowerModeConfig,
    #[serde(default)]
    pub power_center_mode: PowerCenterModeConfig,
    #[serde(default = "default_pue_p5")]
    pub pue_p5: f64,
    #[serde(default = "default_pue_p95")]
    pub pue_p95: f64,
    #[serde(default = "default_power_p5_frac")]
    pub power_p5_frac: f64,
    #[serde(default = "default_power_p95_frac")]
    pub power_p95_frac: f64,
    #[serde(default, rename = "alpha")]
    pub alphas: Vec<AlphaSection>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaSection {
    pub category: AlphaCategoryConfig,
    pub p5: f64,
    pub p95: f64,
    #[serde(default)]
    pub enabled: bool,
}

/// Runs the scenario once per alpha category with only that lever enabled,
/// at the baseline seed, and reports the median reductions.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LeversSection {
    #[serde(default)]
    pub sweep: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FleetSection {
    pub queries_per_day: u64,
    /// Overhead factor; derived from `beta_components` (or the published
    /// defaults) when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_components: Option<BetaComponentsSection>,
    /// Fraction of queries in the long-inference regime; 0 disables the
    /// mixed scenario.
    #[serde(default)]
    pub test_time_fraction: f64,
    #[serde(default = "default_test_time_median")]
    pub test_time_l_out_median: f64,
    /// Efficiency range for the improved scenario; both or neither.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub improved_alpha_p5: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub improved_alpha_p95: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BetaComponentsSection {
    #[serde(default = "default_mean_utilization")]
    pub mean_utilization: f64,
    #[serde(default = "default_p_max_kw")]
    pub p_max_kw: f64,
    #[serde(default = "default_p_idle_kw")]
    pub p_idle_kw: f64,
    #[serde(default = "default_redundancy")]
    pub redundancy_factor: f64,
    #[serde(default = "default_interconnect")]
    pub interconnect_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: FormatConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub destination: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram_path: Option<PathBuf>,
    #[serde(default = "default_histogram_bins")]
    pub histogram_bins: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            format: FormatConfig::Text,
            destination: None,
            samples_path: None,
            histogram_path: None,
            histogram_bins: default_histogram_bins(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LEffModeConfig {
    #[default]
    OutputOnly,
    InputPlusOutput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerModeConfig {
    #[default]
    Independent,
    Coupled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerCenterModeConfig {
    #[default]
    QuantileMatched,
    Recentered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaCategoryConfig {
    Model,
    Serving,
    Hardware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatConfig {
    #[default]
    Text,
    Csv,
}

fn default_seed() -> u64 {
    42
}
fn default_n_samples() -> usize {
    10_000
}
fn default_l_in() -> f64 {
    500.0
}
fn default_l_out_median() -> f64 {
    300.0
}
fn default_pue_p5() -> f64 {
    1.05
}
fn default_pue_p95() -> f64 {
    1.40
}
fn default_power_p5_frac() -> f64 {
    0.4
}
fn default_power_p95_frac() -> f64 {
    0.9
}
fn default_test_time_median() -> f64 {
    5000.0
}
fn default_histogram_bins() -> usize {
    50
}
fn default_mean_utilization() -> f64 {
    0.75
}
fn default_p_max_kw() -> f64 {
    11.3
}
fn default_p_idle_kw() -> f64 {
    2.7
}
fn default_redundancy() -> f64 {
    1.10
}
fn default_interconnect() -> f64 {
    1.12
}

impl LEffModeConfig {
    pub fn to_core(self) -> EffectiveLengthMode {
        match self {
            LEffModeConfig::OutputOnly => EffectiveLengthMode::OutputOnly,
            LEffModeConfig::InputPlusOutput => EffectiveLengthMode::InputPlusOutput,
        }
    }
}

impl PowerModeConfig {
    pub fn to_core(self) -> PowerMode {
        match self {
            PowerModeConfig::Independent => PowerMode::Independent,
            PowerModeConfig::Coupled => PowerMode::Coupled,
        }
    }
}

impl PowerCenterModeConfig {
    pub fn to_core(self) -> PowerCenterMode {
        match self {
            PowerCenterModeConfig::QuantileMatched => PowerCenterMode::QuantileMatched,
            PowerCenterModeConfig::Recentered => PowerCenterMode::Recentered,
        }
    }
}

impl AlphaCategoryConfig {
    pub fn to_core(self) -> AlphaCategory {
        match self {
            AlphaCategoryConfig::Model => AlphaCategory::Model,
            AlphaCategoryConfig::Serving => AlphaCategory::Serving,
            AlphaCategoryConfig::Hardware => AlphaCategory::Hardware,
        }
    }
}

impl BetaComponentsSection {
    pub fn to_core(&self) -> BetaComponents {
        BetaComponents {
            mean_utilization: self.mean_utilization,
            p_max_kw: self.p_max_kw,
            p_idle_kw: self.p_idle_kw,
            redundancy_factor: self.redundancy_factor,
            interconnect_factor: self.interconnect_factor,
        }
    }
}

impl RunConfig {
    /// Parse a TOML document.
    pub fn from_toml(text: &str) -> Result<RunConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Echo the resolved configuration; re-parses to an equivalent config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Semantic validation; returns every violation, not just the first.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut problems = Vec::new();
        let s = &self.scenario;
        if s.name.trim().is_empty() {
            problems.push("scenario.name: must be non-empty".to_string());
        }
        if s.models.is_empty() {
            problems.push("scenario.models: must list at least one model".to_string());
        }
        if s.n_samples == 0 {
            problems.push("scenario.n_samples: must be >= 1".to_string());
        }
        if !(s.l_in >= 0.0) {
            problems.push(format!("scenario.l_in: must be >= 0, got {}", s.l_in));
        }
        if !(s.l_out_median > 0.0) {
            problems.push(format!(
                "scenario.l_out_median: must be > 0, got {}",
                s.l_out_median
            ));
        }
        if !(s.pue_p5 >= 1.0) {
            problems.push(format!("scenario.pue_p5: must be >= 1, got {}", s.pue_p5));
        }
        if !(s.pue_p95 >= s.pue_p5) {
            problems.push(format!(
                "scenario.pue_p95: must be >= pue_p5, got {} < {}",
                s.pue_p95, s.pue_p5
            ));
        }
        if !(s.power_p5_frac > 0.0) {
            problems.push(format!(
                "scenario.power_p5_frac: must be > 0, got {}",
                s.power_p5_frac
            ));
        }
        if !(s.power_p95_frac >= s.power_p5_frac) {
            problems.push(format!(
                "scenario.power_p95_frac: must be >= power_p5_frac, got {} < {}",
                s.power_p95_frac, s.power_p5_frac
            ));
        }
        if !(s.power_p95_frac <= 1.0) {
            problems.push(format!(
                "scenario.power_p95_frac: must be <= 1, got {}",
                s.power_p95_frac
            ));
        }
        let mut seen = Vec::new();
        for (i, a) in s.alphas.iter().enumerate() {
            if !(a.p5 > 0.0) {
                problems.push(format!("scenario.alpha[{i}].p5: must be > 0, got {}", a.p5));
            }
            if !(a.p95 >= a.p5) {
                problems.push(format!(
                    "scenario.alpha[{i}].p95: must be >= p5, got {} < {}",
                    a.p95, a.p5
                ));
            }
            if seen.contains(&a.category) {
                problems.push(format!(
                    "scenario.alpha[{i}].category: duplicate category `{:?}`",
                    a.category
                ));
            }
            seen.push(a.category);
        }
        if let Some(f) = &self.fleet {
            if f.queries_per_day == 0 {
                problems.push("fleet.queries_per_day: must be >= 1".to_string());
            }
            if let Some(beta) = f.beta {
                if !(beta >= 1.0) {
                    problems.push(format!("fleet.beta: must be >= 1, got {beta}"));
                }
            }
            if !(0.0..1.0).contains(&f.test_time_fraction) {
                problems.push(format!(
                    "fleet.test_time_fraction: must be in [0, 1), got {}",
                    f.test_time_fraction
                ));
            }
            if !(f.test_time_l_out_median > 0.0) {
                problems.push(format!(
                    "fleet.test_time_l_out_median: must be > 0, got {}",
                    f.test_time_l_out_median
                ));
            }
            match (f.improved_alpha_p5, f.improved_alpha_p95) {
                (Some(p5), Some(p95)) => {
                    if !(p5 > 0.0) {
                        problems.push(format!("fleet.improved_alpha_p5: must be > 0, got {p5}"));
                    }
                    if !(p95 >= p5) {
                        problems.push(format!(
                            "fleet.improved_alpha_p95: must be >= improved_alpha_p5, got {p95} < {p5}"
                        ));
                    }
                }
                (None, None) => {}
                _ => problems.push(
                    "fleet.improved_alpha_p5/p95: both must be given or neither".to_string(),
                ),
            }
            if let Some(c) = &f.beta_components {
                if !(c.mean_utilization > 0.0 && c.mean_utilization <= 1.0) {
                    problems.push(format!(
                        "fleet.beta_components.mean_utilization: must be in (0, 1], got {}",
                        c.mean_utilization
                    ));
                }
                if !(c.p_idle_kw >= 0.0 && c.p_idle_kw < c.p_max_kw) {
                    problems.push(format!(
                        "fleet.beta_components.p_idle_kw: must be in [0, p_max_kw), got {}",
                        c.p_idle_kw
                    ));
                }
                if !(c.redundancy_factor >= 1.0) {
                    problems.push(format!(
                        "fleet.beta_components.redundancy_factor: must be >= 1, got {}",
                        c.redundancy_factor
                    ));
                }
                if !(c.interconnect_factor >= 1.0) {
                    problems.push(format!(
                        "fleet.beta_components.interconnect_factor: must be >= 1, got {}",
                        c.interconnect_factor
                    ));
                }
            }
        }
        if self.output.histogram_bins == 0 {
            problems.push("output.histogram_bins: must be >= 1".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }

    /// Resolve a configured path against the config file's directory.
    pub fn resolve(config_dir: &Path, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            config_dir.join(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[scenario]
name = "t"
models = ["DeepSeek-R1"]
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.scenario.seed, 42);
        assert_eq!(cfg.scenario.n_samples, 10_000);
        assert_eq!(cfg.scenario.l_in, 500.0);
        assert_eq!(cfg.scenario.l_out_median, 300.0);
        assert_eq!(cfg.scenario.pue_p5, 1.05);
        assert_eq!(cfg.scenario.power_p95_frac, 0.9);
        assert_eq!(cfg.output.histogram_bins, 50);
        assert_eq!(cfg.output.format, FormatConfig::Text);
        assert!(cfg.benchmark.path.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\nnot_a_key = 1\n");
        assert!(RunConfig::from_toml(&text).is_err());
        let text = MINIMAL.replace("name = \"t\"", "name = \"t\"\nbogus = true");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn validation_enumerates_every_bad_field() {
        let text = r#"
[scenario]
name = ""
models = []
n_samples = 0
l_out_median = -3.0
pue_p5 = 0.8
power_p5_frac = 0.0

[fleet]
queries_per_day = 0
beta = 0.5
test_time_fraction = 1.5

[output]
histogram_bins = 0
"#;
        let cfg = RunConfig::from_toml(text).unwrap();
        let problems = cfg.validate().unwrap_err();
        assert!(problems.len() >= 9, "got {problems:?}");
        assert!(problems.iter().any(|p| p.contains("scenario.name")));
        assert!(problems.iter().any(|p| p.contains("scenario.models")));
        assert!(problems.iter().any(|p| p.contains("n_samples")));
        assert!(problems.iter().any(|p| p.contains("l_out_median")));
        assert!(problems.iter().any(|p| p.contains("pue_p5")));
        assert!(problems.iter().any(|p| p.contains("power_p5_frac")));
        assert!(problems.iter().any(|p| p.contains("queries_per_day")));
        assert!(problems.iter().any(|p| p.contains("fleet.beta")));
        assert!(problems.iter().any(|p| p.contains("test_time_fraction")));
        assert!(problems.iter().any(|p| p.contains("histogram_bins")));
    }

    #[test]
    fn duplicate_alpha_categories_rejected() {
        let text = r#"
[scenario]
name = "t"
models = ["m"]

[[scenario.alpha]]
category = "model"
p5 = 1.5
p95 = 10.0

[[scenario.alpha]]
category = "model"
p5 = 2.0
p95 = 3.0
"#;
        let cfg = RunConfig::from_toml(text).unwrap();
        let problems = cfg.validate().unwrap_err();
        assert!(problems.iter().any(|p| p.contains("duplicate category")));
    }

    #[test]
    fn echo_round_trip_is_equivalent() {
        let text = r#"
[benchmark]

[scenario]
name = "fig2"
models = ["DeepSeek-R1", "Llama 3.1 405B"]
seed = 7
n_samples = 2500
l_eff_mode = "input_plus_output"
power_mode = "coupled"
power_center_mode = "recentered"

[[scenario.alpha]]
category = "serving"
p5 = 1.5
p95 = 5.0
enabled = true

[levers]
sweep = true

[fleet]
queries_per_day = 1000000000
test_time_fraction = 0.1
improved_alpha_p5 = 1.5
improved_alpha_p95 = 3.0

[output]
format = "csv"
histogram_bins = 40
"#;
        let cfg = RunConfig::from_toml(text).unwrap();
        cfg.validate().unwrap();
        let echoed = cfg.to_toml();
        let reparsed = RunConfig::from_toml(&echoed).unwrap();
        assert_eq!(cfg, reparsed);
    }
}
