//! JSON scenario configuration and its resolution into simulation types.

use serde::{Deserialize, Serialize};

use crate::drive::PulseParams;
use crate::dynamics::{GridSpec, SystemParams};
use crate::error::{Error, Result};
use crate::material::{derive_spectral_model, MaterialParams, SpectralModel};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExcitonOnly,
    CavityFull,
    CavityClosure,
    KernelOnly,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Mode::ExcitonOnly => "exciton-only",
            Mode::CavityFull => "cavity-full",
            Mode::CavityClosure => "cavity-closure",
            Mode::KernelOnly => "kernel-only",
        };
        f.write_str(s)
    }
}

/// Pulse block: exactly one of `amplitude` (A) or `area` (int f dt) is given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    /// Width a in ps.
    pub width: f64,
    /// Center t0 in ps.
    #[serde(default)]
    pub center: f64,
    /// Laser-exciton detuning delta_L in rad/ps.
    #[serde(default)]
    pub detuning: f64,
}

impl PulseConfig {
    pub fn resolve(&self) -> Result<PulseParams<f64>> {
        let p = match (self.amplitude, self.area) {
            (Some(a), None) => PulseParams {
                amplitude: a,
                width: self.width,
                center: self.center,
                detuning: self.detuning,
            },
            (None, Some(th)) => PulseParams::from_area(th, self.width, self.center, self.detuning),
            _ => {
                return Err(Error::Config {
                    field: "pulse.amplitude".into(),
                    reason: "give exactly one of `amplitude` or `area`".into(),
                })
            }
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// End of the integration span in ps (start is 0).
    pub t_max: f64,
    /// Step in ps.
    pub dt: f64,
    /// Steps between recorded snapshots.
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
}

fn default_stride() -> usize {
    1
}

/// One scenario: what to integrate, with which physical parameters, on which
/// grid, and where to put the artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub material: MaterialParams<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemParams<f64>>,
    pub grid: GridConfig,
    /// Output directory; overridden by the QDSIM_OUT_DIR environment variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Parameters not fixed by the source being reproduced; recorded verbatim
    /// in the manifest.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumed_parameters: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Fully validated configuration with derived quantities.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub mode: Mode,
    pub name: String,
    pub material: MaterialParams<f64>,
    pub spectral: SpectralModel<f64>,
    pub pulse: Option<PulseParams<f64>>,
    pub system: Option<SystemParams<f64>>,
    pub grid: GridSpec<f64>,
    pub warnings: Vec<String>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let spectral = derive_spectral_model(&self.material)?;

        let pulse = match (&self.pulse, self.mode) {
            (Some(p), _) => Some(p.resolve()?),
            (None, Mode::KernelOnly) => None,
            (None, _) => {
                return Err(Error::Config {
                    field: "pulse".into(),
                    reason: format!("required for mode {}", self.mode),
                })
            }
        };

        let system = match (&self.system, self.mode) {
            (Some(s), _) => {
                s.validate()?;
                Some(*s)
            }
            (None, Mode::CavityFull | Mode::CavityClosure) => {
                return Err(Error::Config {
                    field: "system".into(),
                    reason: format!("required for mode {}", self.mode),
                })
            }
            (None, _) => None,
        };

        let grid = GridSpec::from_span(self.grid.t_max, self.grid.dt, self.grid.snapshot_stride);
        grid.validate()?;

        let mut warnings = Vec::new();
        if let Some(p) = &pulse {
            if p.amplitude > 0.0 && self.grid.t_max < p.center + 4.0 * p.width {
                warnings.push(format!(
                    "grid.t_max = {} ends before the pulse tail (center + 4 width = {})",
                    self.grid.t_max,
                    p.center + 4.0 * p.width
                ));
            }
        }

        Ok(Resolved {
            mode: self.mode,
            name: self.preset.clone().unwrap_or_else(|| "run".into()),
            material: self.material,
            spectral,
            pulse,
            system,
            grid,
            warnings,
        })
    }
}

/// Outcome of `check`: the findings a user audits before running.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub valid: bool,
    pub findings: Vec<String>,
    pub warnings: Vec<String>,
}

/// Validate without running; reports resolved unit conversions.
pub fn check(config: &ScenarioConfig) -> CheckReport {
    match config.resolve() {
        Err(e) => CheckReport {
            valid: false,
            findings: vec![format!("invalid: {e}")],
            warnings: Vec::new(),
        },
        Ok(r) => {
            let mut findings = vec![
                "valid".to_string(),
                format!("mode = {}", r.mode),
                format!("spectral prefactor = {} ps^2", r.spectral.prefactor),
                format!("spectral cutoff = {} rad/ps", r.spectral.cutoff),
                format!(
                    "thermal frequency k_B T / hbar = {} rad/ps at T = {} K",
                    units::thermal_frequency(r.material.temperature),
                    r.material.temperature
                ),
            ];
            if let Some(p) = &r.pulse {
                findings.push(format!(
                    "pulse amplitude A = {} (area {}, rotation angle {} rad)",
                    p.amplitude,
                    p.area(),
                    2.0 * p.area()
                ));
            }
            if let Some(s) = &r.system {
                findings.push(format!(
                    "coupling g = {} rad/ps, detuning = {} rad/ps, n_trunc = {}",
                    s.coupling, s.detuning, s.n_trunc
                ));
            }
            CheckReport {
                valid: true,
                findings,
                warnings: r.warnings,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_exciton() -> ScenarioConfig {
        ScenarioConfig {
            mode: Mode::ExcitonOnly,
            preset: None,
            material: MaterialParams::gaas(30.0),
            pulse: Some(PulseConfig {
                amplitude: Some(2.0),
                area: None,
                width: 10.0,
                center: 0.0,
                detuning: 0.0,
            }),
            system: None,
            grid: GridConfig {
                t_max: 60.0,
                dt: 1e-3,
                snapshot_stride: 100,
            },
            output: None,
            assumed_parameters: vec![],
            notes: vec![],
        }
    }

    #[test]
    fn json_round_trip() {
        let c = minimal_exciton();
        let back = ScenarioConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn amplitude_and_area_are_exclusive() {
        let mut c = minimal_exciton();
        c.pulse.as_mut().unwrap().area = Some(1.0);
        assert!(matches!(c.resolve(), Err(Error::Config { .. })));
        c.pulse.as_mut().unwrap().amplitude = None;
        assert!(c.resolve().is_ok());
    }

    #[test]
    fn cavity_mode_requires_system_block() {
        let mut c = minimal_exciton();
        c.mode = Mode::CavityFull;
        let err = c.resolve().unwrap_err();
        assert!(err.to_string().contains("system"));
    }

    #[test]
    fn short_grid_warns_about_pulse_tail() {
        let mut c = minimal_exciton();
        c.grid.t_max = 20.0; // < 0 + 4 * 10
        let r = c.resolve().unwrap();
        assert_eq!(r.warnings.len(), 1);
        let report = check(&c);
        assert!(report.valid);
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn check_reports_offending_field() {
        let mut c = minimal_exciton();
        c.pulse.as_mut().unwrap().width = 0.0;
        let report = check(&c);
        assert!(!report.valid);
        assert!(report.findings[0].contains("width"));
    }

    #[test]
    fn kernel_only_needs_no_pulse() {
        let mut c = minimal_exciton();
        c.mode = Mode::KernelOnly;
        c.pulse = None;
        assert!(c.resolve().is_ok());
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&minimal_exciton().to_json()).unwrap();
        v["typo_field"] = serde_json::json!(1);
        assert!(ScenarioConfig::from_json(&v.to_string()).is_err());
    }
}
