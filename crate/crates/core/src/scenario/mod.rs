//! Scenario configuration, presets, and run orchestration.

mod config;
mod presets;
mod runner;

pub use config::{check, CheckReport, GridConfig, Mode, PulseConfig, Resolved, ScenarioConfig};
pub use presets::{load, preset, preset_names, PRESETS};
pub use runner::{
    load_or_build_table, out_dir, out_dir_with, run, sweep, DerivedQuantities, KernelCacheInfo,
    RunData, RunManifest, SweepAxis, OUT_DIR_ENV,
};
