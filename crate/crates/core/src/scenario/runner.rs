//! Scenario execution: kernel caching, integration dispatch, CSV and
//! manifest emission, and parameter sweeps.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dynamics::{
    closure_integrate, exciton_only_integrate, integrate, ExcitonState, InvariantReport,
    QDCavityState, HERMITICITY_TOL, TRACE_TOL,
};
use crate::error::{Error, Result};
use crate::kernel::{build_table, KernelTable};
use crate::observables::{ObservableRecord, ObservableRecorder};
use crate::scenario::config::{Mode, Resolved, ScenarioConfig};
use crate::units;

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "QDSIM_OUT_DIR";

/// Resolve the output directory: environment override, then the config's
/// `output` field, then `./out`.
pub fn out_dir(config: &ScenarioConfig) -> PathBuf {
    out_dir_with(config, std::env::var(OUT_DIR_ENV).ok().as_deref())
}

/// Precedence logic behind [`out_dir`], with the environment value injected.
pub fn out_dir_with(config: &ScenarioConfig, env_override: Option<&str>) -> PathBuf {
    if let Some(dir) = env_override {
        return PathBuf::from(dir);
    }
    config
        .output
        .as_ref()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Derived quantities recorded in the manifest for unit auditing.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedQuantities {
    pub spectral_prefactor_ps2: f64,
    pub spectral_cutoff_rad_per_ps: f64,
    pub thermal_frequency_rad_per_ps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse_area: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bloch_rotation_angle: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelCacheInfo {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub reused: bool,
}

/// Everything needed to audit a finished run. Deterministic except for
/// `wall_time_s`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub name: String,
    pub mode: Mode,
    pub tool_version: String,
    pub config: ScenarioConfig,
    pub config_sha256: String,
    pub derived: DerivedQuantities,
    pub kernel_cache: KernelCacheInfo,
    pub invariants: InvariantReport,
    /// Trace/hermiticity/positivity within reporting tolerances. The closure
    /// mode is exempt from the positivity check (see `notes`).
    pub passed: bool,
    pub warnings: Vec<String>,
    pub assumed_parameters: Vec<String>,
    pub notes: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

/// Per-run data kept in memory for sweep summaries.
#[derive(Debug, Clone)]
pub enum RunData {
    Kernel,
    Exciton(Vec<ExcitonState<f64>>),
    Cavity(Vec<ObservableRecord<f64>>),
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

/// Cache key over the exact bit patterns of every parameter entering the
/// kernel table.
fn kernel_key(r: &Resolved) -> String {
    let mut h = Sha256::new();
    for v in [
        r.spectral.prefactor,
        r.spectral.cutoff,
        r.material.temperature,
        r.grid.dt,
        r.grid.t_end,
    ] {
        h.update(v.to_bits().to_le_bytes());
    }
    format!("{:x}", h.finalize())[..16].to_string()
}

/// Build the kernel table for a resolved config, or load it from the cache
/// file in `dir` when present.
pub fn load_or_build_table(
    r: &Resolved,
    dir: &Path,
) -> Result<(Arc<KernelTable<f64>>, KernelCacheInfo)> {
    if r.spectral.prefactor == 0.0 {
        return Ok((
            Arc::new(KernelTable::zero(r.spectral.cutoff, r.grid.t_end, r.grid.dt)),
            KernelCacheInfo { file: None, reused: false },
        ));
    }
    let key = kernel_key(r);
    let file = format!("kernel-{key}.csv");
    let path = dir.join(&file);
    if path.exists() {
        let reader = std::io::BufReader::new(fs::File::open(&path)?);
        let table: KernelTable<f64> = KernelTable::read_csv(reader)?;
        let meta_ok = table.model().prefactor.to_bits() == r.spectral.prefactor.to_bits()
            && table.model().cutoff.to_bits() == r.spectral.cutoff.to_bits()
            && table.temperature().to_bits() == r.material.temperature.to_bits()
            && table.dt().to_bits() == r.grid.dt.to_bits()
            && table.t_max() >= r.grid.t_end - r.grid.dt * 1e-6;
        if meta_ok {
            return Ok((
                Arc::new(table),
                KernelCacheInfo { file: Some(file), reused: true },
            ));
        }
    }
    let table = build_table(
        &r.spectral,
        r.material.temperature,
        r.grid.t_end,
        r.grid.dt,
    )?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    write_atomic(&path, &buf)?;
    Ok((
        Arc::new(table),
        KernelCacheInfo { file: Some(file), reused: false },
    ))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn exciton_csv(states: &[ExcitonState<f64>]) -> String {
    let mut s = String::from("t,n_e,inversion,re_p,im_p\n");
    for x in states {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            x.time,
            x.n_e,
            2.0 * x.n_e - 1.0,
            x.p.re,
            x.p.im
        );
    }
    s
}

fn cavity_csv(records: &[ObservableRecord<f64>], n_trunc: usize) -> String {
    let mut s = String::from(
        "t,n_e,inversion,re_p_drive,im_p_drive,re_p_exchange,im_p_exchange,n_mean,n2_mean,mandel,g2",
    );
    for n in 0..=n_trunc {
        let _ = write!(s, ",p{n}");
    }
    s.push('\n');
    for r in records {
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.n_e,
            r.inversion,
            r.p_drive.re,
            r.p_drive.im,
            r.p_exchange.re,
            r.p_exchange.im,
            r.n_mean,
            r.n2_mean,
            fmt_opt(r.mandel),
            fmt_opt(r.g2)
        );
        for p in &r.p {
            let _ = write!(s, ",{p}");
        }
        s.push('\n');
    }
    s
}

/// Execute one scenario, writing CSV outputs and a manifest into the output
/// directory. Returns the manifest and the in-memory snapshot series.
pub fn run(config: &ScenarioConfig) -> Result<(RunManifest, RunData)> {
    let dir = out_dir(config);
    fs::create_dir_all(&dir)?;
    let resolved = config.resolve()?;
    let start = Instant::now();
    let (table, cache_info) = load_or_build_table(&resolved, &dir)?;
    run_with_table(config, &resolved, &table, cache_info, &dir, start)
}

fn run_with_table(
    config: &ScenarioConfig,
    r: &Resolved,
    table: &KernelTable<f64>,
    cache_info: KernelCacheInfo,
    dir: &Path,
    start: Instant,
) -> Result<(RunManifest, RunData)> {
    let mut outputs = Vec::new();
    let mut notes = config.notes.clone();
    notes.push("detunings are interpreted in rad/ps".to_string());

    let (invariants, data) = match r.mode {
        Mode::KernelOnly => {
            let file = format!("{}_kernel.csv", r.name);
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            write_atomic(&dir.join(&file), &buf)?;
            outputs.push(file);
            (InvariantReport::default(), RunData::Kernel)
        }
        Mode::ExcitonOnly => {
            let pulse = r.pulse.as_ref().expect("resolved exciton run has a pulse");
            let traj =
                exciton_only_integrate(pulse, table, &ExcitonState::ground(), &r.grid)?;
            let file = format!("{}.csv", r.name);
            write_atomic(&dir.join(&file), exciton_csv(&traj.states).as_bytes())?;
            outputs.push(file);
            (traj.report, RunData::Exciton(traj.states))
        }
        Mode::CavityFull | Mode::CavityClosure => {
            let pulse = r.pulse.as_ref().expect("resolved cavity run has a pulse");
            let sys = r.system.as_ref().expect("resolved cavity run has a system");
            let rho0 = QDCavityState::ground(sys.n_trunc);
            let mut rec = ObservableRecorder::new();
            let report = match r.mode {
                Mode::CavityFull => integrate(sys, pulse, table, &rho0, &r.grid, &mut rec)?,
                _ => {
                    notes.push(
                        "closure mode: transient negative populations are an inherent \
                         property of the reduced equations and exempt from the pass check"
                            .to_string(),
                    );
                    closure_integrate(sys, pulse, table, &rho0, &r.grid, &mut rec)?
                }
            };
            let file = format!("{}.csv", r.name);
            write_atomic(
                &dir.join(&file),
                cavity_csv(&rec.records, sys.n_trunc).as_bytes(),
            )?;
            outputs.push(file);
            (report, RunData::Cavity(rec.records))
        }
    };

    let passed = match r.mode {
        Mode::CavityClosure => {
            invariants.max_trace_drift <= TRACE_TOL
                && invariants.max_hermiticity_drift <= HERMITICITY_TOL
        }
        _ => invariants.within_tolerances(),
    };

    let manifest = RunManifest {
        name: r.name.clone(),
        mode: r.mode,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        config_sha256: sha256_hex(config.to_json().as_bytes()),
        derived: DerivedQuantities {
            spectral_prefactor_ps2: r.spectral.prefactor,
            spectral_cutoff_rad_per_ps: r.spectral.cutoff,
            thermal_frequency_rad_per_ps: units::thermal_frequency(r.material.temperature),
            pulse_area: r.pulse.as_ref().map(|p| p.area()),
            bloch_rotation_angle: r.pulse.as_ref().map(|p| 2.0 * p.area()),
        },
        kernel_cache: cache_info,
        invariants,
        passed,
        warnings: r.warnings.clone(),
        assumed_parameters: config.assumed_parameters.clone(),
        notes,
        outputs,
        wall_time_s: start.elapsed().as_secs_f64(),
    };

    let manifest_file = dir.join(format!("{}.manifest.json", r.name));
    let json = serde_json::to_string_pretty(&manifest)?;
    write_atomic(&manifest_file, json.as_bytes())?;
    Ok((manifest, data))
}

/// Parameter axes a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Amplitude,
    Width,
    Detuning,
    Coupling,
    Temperature,
    NTrunc,
}

impl SweepAxis {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "A" | "amplitude" => SweepAxis::Amplitude,
            "a" | "width" => SweepAxis::Width,
            "delta" | "detuning" => SweepAxis::Detuning,
            "g" | "coupling" => SweepAxis::Coupling,
            "T" | "temperature" => SweepAxis::Temperature,
            "n_trunc" => SweepAxis::NTrunc,
            other => {
                return Err(Error::Config {
                    field: "axis".into(),
                    reason: format!(
                        "unknown axis `{other}`; expected one of A, a, delta, g, T, n_trunc"
                    ),
                })
            }
        })
    }

    fn label(&self) -> &'static str {
        match self {
            SweepAxis::Amplitude => "A",
            SweepAxis::Width => "a",
            SweepAxis::Detuning => "delta",
            SweepAxis::Coupling => "g",
            SweepAxis::Temperature => "T",
            SweepAxis::NTrunc => "n_trunc",
        }
    }

    fn apply(&self, config: &mut ScenarioConfig, value: f64) -> Result<()> {
        fn need_pulse(c: &mut ScenarioConfig) -> Result<&mut crate::scenario::config::PulseConfig> {
            c.pulse.as_mut().ok_or(Error::Config {
                field: "pulse".into(),
                reason: "axis requires a pulse block".into(),
            })
        }
        fn need_system(c: &mut ScenarioConfig) -> Result<&mut crate::dynamics::SystemParams<f64>> {
            c.system.as_mut().ok_or(Error::Config {
                field: "system".into(),
                reason: "axis requires a system block".into(),
            })
        }
        match self {
            SweepAxis::Amplitude => {
                let p = need_pulse(config)?;
                p.amplitude = Some(value);
                p.area = None;
            }
            SweepAxis::Width => need_pulse(config)?.width = value,
            SweepAxis::Detuning => need_system(config)?.detuning = value,
            SweepAxis::Coupling => need_system(config)?.coupling = value,
            SweepAxis::Temperature => config.material.temperature = value,
            SweepAxis::NTrunc => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::Config {
                        field: "n_trunc".into(),
                        reason: format!("sweep value {value} is not a positive integer"),
                    });
                }
                need_system(config)?.n_trunc = value as usize;
            }
        }
        Ok(())
    }
}

fn reductions(data: &RunData) -> (Option<f64>, Option<f64>, Option<f64>, Option<f64>) {
    match data {
        RunData::Kernel => (None, None, None, None),
        RunData::Exciton(states) => {
            let max_ne = states.iter().map(|s| s.n_e).fold(f64::MIN, f64::max);
            (Some(max_ne), None, None, None)
        }
        RunData::Cavity(records) => {
            let max_ne = records.iter().map(|r| r.n_e).fold(f64::MIN, f64::max);
            let max_n = records.iter().map(|r| r.n_mean).fold(f64::MIN, f64::max);
            let final_n = records.last().map(|r| r.n_mean);
            let min_m = records
                .iter()
                .filter_map(|r| r.mandel)
                .fold(f64::INFINITY, f64::min);
            let min_m = if min_m.is_finite() { Some(min_m) } else { None };
            (Some(max_ne), Some(max_n), final_n, min_m)
        }
    }
}

fn n_mean_series(data: &RunData) -> Option<Vec<f64>> {
    match data {
        RunData::Cavity(records) => Some(records.iter().map(|r| r.n_mean).collect()),
        _ => None,
    }
}

/// Run `base` once per value of `axis`, sharing kernel tables between runs
/// with identical spectral/grid parameters, and write a summary CSV.
pub fn sweep(
    base: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<(Vec<RunManifest>, PathBuf)> {
    let dir = out_dir(base);
    fs::create_dir_all(&dir)?;
    let base_name = base.preset.clone().unwrap_or_else(|| "run".into());

    // Per-value configs, validated up front so errors name the value.
    let mut jobs = Vec::new();
    for &v in values {
        let mut c = base.clone();
        axis.apply(&mut c, v)?;
        c.preset = Some(format!("{}_{}{}", base_name, axis.label(), v));
        let resolved = c.resolve()?;
        jobs.push((v, c, resolved));
    }

    // Build each distinct kernel table once.
    let mut tables: HashMap<String, (Arc<KernelTable<f64>>, KernelCacheInfo)> = HashMap::new();
    for (_, _, r) in &jobs {
        let key = kernel_key(r);
        if !tables.contains_key(&key) {
            let built = load_or_build_table(r, &dir)?;
            tables.insert(key, built);
        }
    }

    let results: Vec<(f64, RunManifest, RunData)> = jobs
        .par_iter()
        .map(|(v, c, r)| {
            let start = Instant::now();
            let (table, mut info) = tables[&kernel_key(r)].clone();
            info.reused = true; // shared within the sweep
            let (manifest, data) = run_with_table(c, r, &table, info, &dir, start)?;
            Ok((*v, manifest, data))
        })
        .collect::<Result<_>>()?;

    let mut csv = String::from(
        "axis,value,name,max_n_e,max_n_mean,final_n_mean,min_mandel,max_trace_drift,passed,delta_n_mean_vs_prev\n",
    );
    let mut prev_series: Option<Vec<f64>> = None;
    let mut manifests = Vec::new();
    for (v, manifest, data) in results {
        let (max_ne, max_n, final_n, min_m) = reductions(&data);
        let series = n_mean_series(&data);
        let delta = match (&prev_series, &series) {
            (Some(a), Some(b)) if a.len() == b.len() => Some(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0f64, f64::max),
            ),
            _ => None,
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            axis.label(),
            v,
            manifest.name,
            fmt_opt(max_ne),
            fmt_opt(max_n),
            fmt_opt(final_n),
            fmt_opt(min_m),
            manifest.invariants.max_trace_drift,
            manifest.passed,
            fmt_opt(delta)
        );
        prev_series = series;
        manifests.push(manifest);
    }
    let summary = dir.join(format!("{}_sweep_{}.csv", base_name, axis.label()));
    write_atomic(&summary, csv.as_bytes())?;
    Ok((manifests, summary))
}
