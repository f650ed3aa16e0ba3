//! Provenance metadata embedded in every artifact.

use std::collections::BTreeMap;

/// Effective parameters of a command, flattened to strings and ordered by key
/// so that the serialized form is stable.
pub type RunConfig = BTreeMap<String, String>;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Parse the flat `key = value` config format. `#` starts a comment line.
pub fn parse_config(text: &str) -> Result<RunConfig, String> {
    let mut out = RunConfig::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn render_config(config: &RunConfig) -> String {
    config.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
