//! Config and sweep file parsing.

use std::path::Path;

use mwrc_core::model::NetworkConfig;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    clusters: Vec<Vec<usize>>,
    relay_antennas: usize,
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

/// Parses a network config document:
///
/// ```toml
/// clusters = [[3, 2], [2, 2]]
/// relay_antennas = 3
/// ```
pub fn parse_config(text: &str) -> Result<NetworkConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))?;
    NetworkConfig::new(raw.clusters, raw.relay_antennas).map_err(|e| CliError::usage(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<NetworkConfig, CliError> {
    parse_config(&read(path)?)
}
