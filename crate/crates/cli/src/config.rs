//! Scenario config files: TOML or JSON documents mirroring
//! [`ScenarioConfig`] plus output options. Unknown keys are rejected;
//! missing keys fall back to the stock experiment for the chosen axis.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

use mcs_auctions::mechanism::MechanismKind;
use mcs_auctions::sim::{ScenarioConfig, SweepAxis};
use mcs_auctions::ScenarioConfig64;

/// On-disk scenario description. Only `sweep_axis` is required.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfigFile {
    pub sweep_axis: SweepAxis,
    pub mechanisms: Option<Vec<MechanismKind>>,
    pub sweep_values: Option<Vec<u32>>,
    pub fixed_n_participants: Option<u32>,
    pub fixed_n_tasks: Option<u32>,
    pub repetitions: Option<u32>,
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub generator: GeneratorSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Generator overrides. Population counts and the seed are controlled by
/// the scenario itself and cannot be set here.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub area_width: Option<f64>,
    pub area_height: Option<f64>,
    pub interest_radius: Option<f64>,
    pub alpha: Option<f64>,
    pub task_value_range: Option<[f64; 2]>,
    pub collective_bid_range: Option<[f64; 2]>,
    pub reputation_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub aggregate: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Where and how results get written.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputOptions {
    /// Target file; stdout when absent.
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
    pub aggregate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigFormat {
    Toml,
    Json,
}

fn build(file: CliConfigFile) -> anyhow::Result<(ScenarioConfig64, OutputOptions)> {
    let mut config = ScenarioConfig::defaults_for(file.sweep_axis);
    if let Some(mechanisms) = file.mechanisms {
        config.mechanisms = mechanisms;
    }
    if let Some(values) = file.sweep_values {
        config.sweep_values = values;
    }
    if let Some(n) = file.fixed_n_participants {
        config.fixed_n_participants = n;
    }
    if let Some(m) = file.fixed_n_tasks {
        config.fixed_n_tasks = m;
    }
    if let Some(r) = file.repetitions {
        config.repetitions = r;
    }
    if let Some(seed) = file.master_seed {
        config.master_seed = seed;
    }
    let g = file.generator;
    if let Some(v) = g.area_width {
        config.generator.area_width = v;
    }
    if let Some(v) = g.area_height {
        config.generator.area_height = v;
    }
    if let Some(v) = g.interest_radius {
        config.generator.interest_radius = v;
    }
    if let Some(v) = g.alpha {
        config.generator.alpha = v;
    }
    if let Some(v) = g.task_value_range {
        config.generator.task_value_range = v;
    }
    if let Some(v) = g.collective_bid_range {
        config.generator.collective_bid_range = v;
    }
    if let Some(v) = g.reputation_range {
        config.generator.reputation_range = v;
    }
    config.validate()?;
    let options = OutputOptions {
        path: file.output.path,
        format: file.output.format.unwrap_or_default(),
        aggregate: file.output.aggregate.unwrap_or(false),
    };
    Ok((config, options))
}

/// Parses a config document in the given format and validates it.
pub fn parse_config(
    text: &str,
    format: ConfigFormat,
) -> anyhow::Result<(ScenarioConfig64, OutputOptions)> {
    let file: CliConfigFile = match format {
        ConfigFormat::Toml => toml::from_str(text).context("parsing TOML config")?,
        ConfigFormat::Json => serde_json::from_str(text).context("parsing JSON config")?,
    };
    build(file)
}

/// Loads a config file, picking the format from the extension
/// (`.json` is JSON, anything else TOML).
pub fn load_config(path: &Path) -> anyhow::Result<(ScenarioConfig64, OutputOptions)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => ConfigFormat::Json,
        _ => ConfigFormat::Toml,
    };
    parse_config(&text, format).with_context(|| format!("in config file {}", path.display()))
}

/// Parses a comma-separated mechanism list like `RPB-RA,2SB-RA`.
pub fn parse_mechanism_list(items: &[String]) -> anyhow::Result<Vec<MechanismKind>> {
    let mut kinds = Vec::new();
    for item in items {
        for piece in item.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            kinds.push(piece.parse::<MechanismKind>()?);
        }
    }
    if kinds.is_empty() {
        bail!("mechanism list is empty");
    }
    Ok(kinds)
}
