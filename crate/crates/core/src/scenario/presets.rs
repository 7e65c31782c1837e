//! Built-in scenario presets, shipped as JSON data files.

use crate::error::{Error, Result};
use crate::scenario::config::ScenarioConfig;

/// (name, JSON source) pairs for every shipped preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig1a", include_str!("../../presets/fig1a.json")),
    ("fig1b", include_str!("../../presets/fig1b.json")),
    ("fig3_d0", include_str!("../../presets/fig3_d0.json")),
    ("fig3_d1", include_str!("../../presets/fig3_d1.json")),
    ("fig4_d0", include_str!("../../presets/fig4_d0.json")),
    ("fig4_d1", include_str!("../../presets/fig4_d1.json")),
    ("fig7_d2", include_str!("../../presets/fig7_d2.json")),
    ("fig8_d2", include_str!("../../presets/fig8_d2.json")),
    ("kernel30k", include_str!("../../presets/kernel30k.json")),
];

/// Names of all shipped presets.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// Load a preset by name.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let (_, json) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config {
            field: "preset".into(),
            reason: format!("unknown preset `{name}`; known: {}", preset_names().join(", ")),
        })?;
    ScenarioConfig::from_json(json)
}

/// Load a config from a file path, or fall back to a preset name.
pub fn load(path_or_name: &str) -> Result<ScenarioConfig> {
    let p = std::path::Path::new(path_or_name);
    if p.exists() {
        let text = std::fs::read_to_string(p)?;
        ScenarioConfig::from_json(&text)
    } else {
        preset(path_or_name)
    }
}
