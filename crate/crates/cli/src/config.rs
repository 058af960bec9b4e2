//! Run configuration: built-in defaults, overridden by a config file,
//! overridden by CLI flags (`RULEMON_WORKERS` sits between file and flags).

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use rulemon_core::engine::Denominator;
use rulemon_core::predicates::PredicateParams;
use rulemon_core::world::TrajectoryFormat;

/// Config-file shape; every field optional so files can be partial.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub map: Option<PathBuf>,
    pub trajectories: Option<PathBuf>,
    pub format: Option<String>,
    pub rules: Option<Vec<String>>,
    pub rule_file: Option<PathBuf>,
    pub params: Option<BTreeMap<String, f64>>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub deterministic: Option<bool>,
    pub fail_on_violation: Option<bool>,
    pub denominator: Option<String>,
}

/// Fully resolved configuration for `check` and `labels`.
#[derive(Debug)]
pub struct RunConfig {
    pub map: PathBuf,
    pub trajectories: PathBuf,
    pub format: TrajectoryFormat,
    pub rules: Vec<String>,
    pub rule_file: Option<PathBuf>,
    pub params: PredicateParams,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub deterministic: bool,
    pub fail_on_violation: bool,
    pub denominator: Denominator,
}

pub fn parse_format(name: &str) -> Result<TrajectoryFormat> {
    match name {
        "native" | "native-csv" => Ok(TrajectoryFormat::NativeCsv),
        "interaction" | "interaction-csv" => Ok(TrajectoryFormat::InteractionCsv),
        other => bail!("unknown trajectory format `{other}` (native | interaction)"),
    }
}

pub fn parse_denominator(name: &str) -> Result<Denominator> {
    match name {
        "all" => Ok(Denominator::AllAgents),
        "instantiated" => Ok(Denominator::Instantiated),
        other => bail!("unknown denominator `{other}` (all | instantiated)"),
    }
}

/// `key=value` pairs from repeated `--param` flags.
pub fn parse_param(text: &str) -> Result<(String, f64)> {
    let (key, value) = text
        .split_once('=')
        .with_context(|| format!("expected key=value, got `{text}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .with_context(|| format!("invalid float in `{text}`"))?;
    Ok((key.trim().to_string(), value))
}

pub struct Overrides {
    pub map: Option<PathBuf>,
    pub trajectories: Option<PathBuf>,
    pub format: Option<String>,
    pub rules: Option<Vec<String>>,
    pub rule_file: Option<PathBuf>,
    pub params: Vec<(String, f64)>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub deterministic: bool,
    pub fail_on_violation: bool,
    pub denominator: Option<String>,
}

pub fn resolve(file: Option<&PathBuf>, flags: Overrides) -> Result<RunConfig> {
    let file_config = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            serde_json::from_str::<ConfigFile>(&text)
                .with_context(|| format!("parsing config file {}", path.display()))?
        }
        None => ConfigFile::default(),
    };

    let map = flags
        .map
        .or(file_config.map)
        .context("a map is required (--map or config `map`)")?;
    let trajectories = flags
        .trajectories
        .or(file_config.trajectories)
        .context("a trajectory file is required (--traj or config `trajectories`)")?;
    let format = parse_format(
        flags
            .format
            .or(file_config.format)
            .unwrap_or_else(|| "native".into())
            .as_str(),
    )?;
    let rules = flags
        .rules
        .or(file_config.rules)
        .unwrap_or_else(|| vec!["all".into()]);

    // built-in defaults, then config-file params, then --param flags
    let mut merged: BTreeMap<String, f64> = file_config.params.unwrap_or_default();
    for (key, value) in flags.params {
        merged.insert(key, value);
    }
    let params = PredicateParams::default()
        .with_overrides(&merged)
        .context("invalid parameter override")?;

    let env_workers = std::env::var("RULEMON_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    let workers = flags.workers.or(env_workers).or(file_config.workers);

    let denominator = parse_denominator(
        flags
            .denominator
            .or(file_config.denominator)
            .unwrap_or_else(|| "all".into())
            .as_str(),
    )?;

    Ok(RunConfig {
        map,
        trajectories,
        format,
        rules,
        rule_file: flags.rule_file.or(file_config.rule_file),
        params,
        out: flags.out.or(file_config.out).unwrap_or_else(|| ".".into()),
        workers,
        deterministic: flags.deterministic || file_config.deterministic.unwrap_or(false),
        fail_on_violation: flags.fail_on_violation
            || file_config.fail_on_violation.unwrap_or(false),
        denominator,
    })
}
