//! Config files, run manifests and worker-count resolution.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ringburst_core::montecarlo::{ExperimentConfig, ResolvedConfig};
use serde::{Deserialize, Serialize};

pub const WORKERS_ENV: &str = "RINGBURST_WORKERS";

/// Written next to every set of outputs; `simulate --config manifest.json`
/// reproduces the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config_source: Option<String>,
    pub output_dir: Option<String>,
    pub master_seed: u64,
    pub workers: usize,
    pub config: ExperimentConfig,
    pub resolved: ResolvedConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn new(subcommand: &str, source: Option<&Path>, out: Option<&Path>, workers: usize, resolved: &ResolvedConfig) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            config_source: source.map(|p| p.display().to_string()),
            output_dir: out.map(|p| p.display().to_string()),
            master_seed: resolved.config.master_seed,
            workers,
            config: resolved.config.clone(),
            resolved: resolved.clone(),
            extra: None,
        }
    }
}

/// Reads an experiment config, or the config embedded in a manifest.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: serde_json::Value = serde_json::from_str(text).context("config is not valid JSON")?;
    let is_manifest = value.get("subcommand").is_some() && value.get("config").is_some();
    let inner = if is_manifest { value["config"].clone() } else { value };
    match serde_json::from_value::<ExperimentConfig>(inner) {
        Ok(cfg) => Ok(cfg),
        Err(e) => bail!("config schema violation: {e}"),
    }
}

/// `--workers` wins, then the environment, then the machine's parallelism.
pub fn resolve_workers(flag: Option<usize>) -> Result<usize> {
    if let Some(w) = flag {
        if w == 0 {
            bail!("--workers must be at least 1");
        }
        return Ok(w);
    }
    if let Ok(text) = std::env::var(WORKERS_ENV) {
        let w: usize = text
            .trim()
            .parse()
            .with_context(|| format!("{WORKERS_ENV}={text:?} is not a worker count"))?;
        if w == 0 {
            bail!("{WORKERS_ENV} must be at least 1");
        }
        return Ok(w);
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trip() {
        let cfg = parse_config(r#"{"n": 10, "p": 0, "initial": {"count": 5}, "placement": "alternating", "replicates": 2}"#).unwrap();
        let manifest = RunManifest::new("simulate", None, None, 3, &cfg.resolve().unwrap());
        let text = serde_json::to_string(&manifest).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = parse_config(r#"{"p": 0.1, "initial": {"count": 3}, "replicates": 1}"#).unwrap_err();
        assert!(format!("{err:#}").contains("`n`"));
        assert!(parse_config("not json").is_err());
    }
}
