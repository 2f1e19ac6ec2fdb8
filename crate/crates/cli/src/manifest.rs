//! Run manifests and configuration resolution.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use clusterbench::model::PLACEMENT;
use clusterbench::{Comparator, ScenarioConfig, RNG_NAME};

use crate::failure::{CliResult, Failure};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SEED_ENV: &str = "CLUSTERBENCH_SEED";

/// Written next to every output set. Feeding it back through `--manifest`
/// reproduces the run, timestamp included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ScenarioConfig,
    pub seed: u64,
    pub rng: String,
    pub placement: String,
    pub comparator: Comparator,
    /// Seconds since the Unix epoch when the original run was made.
    pub created_unix: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepPlan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub sizes: Vec<usize>,
    pub seeds: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: &ScenarioConfig, created_unix: u64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.clone(),
            seed: config.seed,
            rng: RNG_NAME.to_string(),
            placement: PLACEMENT.to_string(),
            comparator: config.comparator,
            created_unix,
            input: None,
            sweep: None,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))
            .map_err(Failure::config)?;
        let manifest: RunManifest = serde_json::from_str(&text)
            .with_context(|| format!("parsing manifest {}", path.display()))
            .map_err(Failure::config)?;
        manifest.config.validate()?;
        Ok(manifest)
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(Failure::runtime)?;
        text.push('\n');
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::runtime)
    }
}

pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or_default()
}

/// Where the effective configuration came from.
pub struct Resolved {
    pub config: ScenarioConfig,
    pub created_unix: u64,
    pub sweep: Option<SweepPlan>,
}

/// Builds the effective configuration.
///
/// Base: the manifest's config, else the config file, else defaults. Seed
/// precedence: `--seed`, then the manifest or the file's `seed` key, then
/// `CLUSTERBENCH_SEED`, then the default.
pub fn resolve(
    config_path: Option<&Path>,
    manifest_path: Option<&Path>,
    seed: Option<u64>,
    comparator: Option<Comparator>,
) -> CliResult<Resolved> {
    let (mut config, created_unix, sweep) = if let Some(path) = manifest_path {
        let m = RunManifest::load(path)?;
        (m.config, m.created_unix, m.sweep)
    } else {
        let (config, file_has_seed) = match config_path {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))
                    .map_err(Failure::config)?;
                let value: serde_json::Value = serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))
                    .map_err(Failure::config)?;
                let has_seed = value.get("seed").is_some();
                (ScenarioConfig::from_json_value(value)?, has_seed)
            }
            None => (ScenarioConfig::default(), false),
        };
        let mut config = config;
        if !file_has_seed {
            if let Ok(raw) = std::env::var(SEED_ENV) {
                config.seed = raw
                    .trim()
                    .parse()
                    .with_context(|| format!("{SEED_ENV}={raw:?} is not a u64"))
                    .map_err(Failure::config)?;
            }
        }
        (config, now_unix(), None)
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(c) = comparator {
        config.comparator = c;
    }
    config.validate()?;
    Ok(Resolved {
        config,
        created_unix,
        sweep,
    })
}
