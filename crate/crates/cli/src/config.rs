//! Configuration files, CLI overrides and their resolution into validated
//! run parameters.
//!
//! Config files are TOML with sections `[params]`, `[trajectory]` and
//! `[run]`. Frequencies and rates are plain frequencies in MHz (converted
//! internally to angular rad/us), times are in us. Unknown keys are rejected
//! so unit mistakes fail loudly. A `manifest.json` written by a previous run
//! parses back into the identical resolved configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use superatom::models::{effective_coupling, Branch, PhysicalParams, Preset};
use superatom::units::{mhz, to_mhz};
use superatom::TrajectoryConfig64;

use crate::{io_err, CliError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub trajectory: TrajectorySection,
    #[serde(default)]
    pub run: RunSection,
}

/// `[params]`: physical parameters, frequencies in MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub n_atoms: Option<u64>,
    pub g0: Option<f64>,
    pub omega: Option<f64>,
    pub delta: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub delta_probe: Option<f64>,
    pub n_bubbles: Option<usize>,
    pub n_max: Option<usize>,
}

/// `[trajectory]`: integrator and sampling controls, times in us.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    pub t_final: Option<f64>,
    pub dt_max: Option<f64>,
    pub sample_dt: Option<f64>,
    pub seed: Option<u64>,
    pub jump_time_tol: Option<f64>,
    pub norm_floor: Option<f64>,
}

/// `[run]`: mode, preset, outputs and sweep controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub mode: Option<String>,
    pub preset: Option<String>,
    pub output_dir: Option<String>,
    pub workers: Option<usize>,
    /// Ensemble size M.
    pub trajectories: Option<usize>,
    /// Spectrum sweep bounds in MHz; default -2 g_eff .. +2 g_eff.
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub points: Option<usize>,
    /// Burst clustering window in us; default 2/kappa.
    pub burst_window: Option<f64>,
    /// Address the lower dressed branch (preset detunings flip sign).
    pub lower_branch: Option<bool>,
    /// Set the probe amplitude to zero at the first cavity click.
    pub quench: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Spectrum,
    Trajectory,
    Ensemble,
    Master,
    LadderSpectrum,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Trajectory => "trajectory",
            Mode::Ensemble => "ensemble",
            Mode::Master => "master",
            Mode::LadderSpectrum => "ladder-spectrum",
        }
    }

    pub fn from_name(name: &str) -> Result<Mode, CliError> {
        match name {
            "spectrum" => Ok(Mode::Spectrum),
            "trajectory" => Ok(Mode::Trajectory),
            "ensemble" => Ok(Mode::Ensemble),
            "master" => Ok(Mode::Master),
            "ladder-spectrum" => Ok(Mode::LadderSpectrum),
            other => Err(CliError::Config(format!(
                "invalid parameter `mode`: unknown mode {other:?} \
                 (expected spectrum|trajectory|ensemble|master|ladder-spectrum)"
            ))),
        }
    }
}

/// Values given on the command line; they override the config file.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub mode: Option<Mode>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub trajectories: Option<usize>,
    pub lower_branch: bool,
    pub quench: bool,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub points: Option<usize>,
    pub t_final: Option<f64>,
}

/// Fully resolved and validated run configuration. `file` holds every value
/// in file units (all options filled), so writing it to a manifest and
/// parsing it back reproduces this struct bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub file: ConfigFile,
    pub mode: Mode,
    pub preset: Option<Preset>,
    pub params: PhysicalParams<f64>,
    pub trajectory: TrajectoryConfig64,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub trajectories: usize,
    /// Spectrum sweep grid, angular rad/us.
    pub grid: Vec<f64>,
    /// Burst clustering window, us.
    pub burst_window: f64,
    pub quench: bool,
}

/// Read a config file: TOML, or the `manifest.json` of a previous run.
pub fn parse_config_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("cannot parse manifest {path:?}: {e}")))?;
        Ok(manifest.config)
    } else {
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("cannot parse config {path:?}: {e}")))
    }
}

/// Merge defaults, the config file and CLI overrides; apply the preset; build
/// and validate the typed parameters.
pub fn resolve(file: Option<ConfigFile>, cli: &CliOverrides) -> Result<ResolvedConfig, CliError> {
    let mut f = file.unwrap_or_default();

    // defaults in file units
    let d = PhysicalParams::<f64>::default();
    let p = &mut f.params;
    p.n_atoms.get_or_insert(d.n_atoms);
    p.g0.get_or_insert(to_mhz(d.g0));
    p.omega.get_or_insert(to_mhz(d.omega));
    p.delta.get_or_insert(to_mhz(d.delta));
    p.kappa.get_or_insert(to_mhz(d.kappa));
    p.gamma.get_or_insert(to_mhz(d.gamma));
    p.alpha.get_or_insert(to_mhz(d.alpha));
    p.delta_probe.get_or_insert(to_mhz(d.delta_probe));
    p.n_bubbles.get_or_insert(d.n_bubbles);
    p.n_max.get_or_insert(d.n_max);

    let t = &mut f.trajectory;
    if let Some(tf) = cli.t_final {
        t.t_final = Some(tf);
    }
    t.t_final.get_or_insert(20.0);
    t.dt_max.get_or_insert(1e-3);
    t.sample_dt.get_or_insert(2e-3);
    t.jump_time_tol.get_or_insert(t.dt_max.unwrap() / 100.0);
    t.norm_floor.get_or_insert(1e-15);

    let r = &mut f.run;
    if let Some(mode) = cli.mode {
        r.mode = Some(mode.name().to_string());
    }
    r.mode.get_or_insert_with(|| "trajectory".to_string());
    if let Some(preset) = &cli.preset {
        r.preset = Some(preset.clone());
    }
    if let Some(seed) = cli.seed {
        f.trajectory.seed = Some(seed);
    }
    f.trajectory.seed.get_or_insert(1);
    let r = &mut f.run;
    if let Some(w) = cli.workers {
        r.workers = Some(w);
    }
    r.workers.get_or_insert(1);
    if let Some(out) = &cli.output_dir {
        r.output_dir = Some(out.display().to_string());
    }
    r.output_dir.get_or_insert_with(|| "out".to_string());
    if let Some(m) = cli.trajectories {
        r.trajectories = Some(m);
    }
    r.trajectories.get_or_insert(256);
    if cli.lower_branch {
        r.lower_branch = Some(true);
    }
    r.lower_branch.get_or_insert(false);
    if cli.quench {
        r.quench = Some(true);
    }
    r.quench.get_or_insert(false);
    if let Some(v) = cli.delta_min {
        r.delta_min = Some(v);
    }
    if let Some(v) = cli.delta_max {
        r.delta_max = Some(v);
    }
    if let Some(v) = cli.points {
        r.points = Some(v);
    }
    r.points.get_or_insert(201);

    // preset overwrites alpha and delta_probe (in file units, so the
    // manifest round-trips exactly)
    let preset = match &f.run.preset {
        Some(name) => Some(Preset::from_name(name).ok_or_else(|| {
            CliError::Config(format!(
                "invalid parameter `preset`: unknown preset {name:?} (expected fig3|fig4|fig5|fig6)"
            ))
        })?),
        None => None,
    };
    if let Some(preset) = preset {
        let interim = build_params(&f.params)?;
        let g_eff_mhz =
            to_mhz(effective_coupling(&interim).map_err(|e| CliError::Config(e.to_string()))?);
        let branch = if f.run.lower_branch.unwrap() {
            Branch::Lower
        } else {
            Branch::Upper
        };
        let sign = match branch {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        };
        f.params.alpha = Some(preset.alpha_mhz());
        f.params.delta_probe = Some(sign * preset.detuning_in_geff() * g_eff_mhz);
    }

    // spectrum sweep defaults need g_eff
    let params = build_params(&f.params)?;
    params
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let g_eff_mhz =
        to_mhz(effective_coupling(&params).map_err(|e| CliError::Config(e.to_string()))?);
    f.run.delta_min.get_or_insert(-2.0 * g_eff_mhz);
    f.run.delta_max.get_or_insert(2.0 * g_eff_mhz);
    f.run
        .burst_window
        .get_or_insert(2.0 / mhz::<f64>(f.params.kappa.unwrap()));

    let mode = Mode::from_name(f.run.mode.as_deref().unwrap())?;
    let trajectory = build_trajectory(&f.trajectory)?;
    let trajectories = f.run.trajectories.unwrap();
    if trajectories == 0 {
        return Err(CliError::Config(
            "invalid parameter `trajectories`: ensemble size must be >= 1".into(),
        ));
    }
    let workers = f.run.workers.unwrap();
    if workers == 0 {
        return Err(CliError::Config(
            "invalid parameter `workers`: must be >= 1".into(),
        ));
    }
    let points = f.run.points.unwrap();
    if points == 0 {
        return Err(CliError::Config(
            "invalid parameter `points`: sweep needs >= 1 point".into(),
        ));
    }
    let (lo, hi) = (f.run.delta_min.unwrap(), f.run.delta_max.unwrap());
    if hi < lo {
        return Err(CliError::Config(
            "invalid parameter `delta_max`: must be >= delta_min".into(),
        ));
    }
    let grid: Vec<f64> = if points == 1 {
        vec![mhz(lo)]
    } else {
        (0..points)
            .map(|i| mhz(lo + (hi - lo) * i as f64 / (points - 1) as f64))
            .collect()
    };
    let burst_window = f.run.burst_window.unwrap();
    if !(burst_window > 0.0) {
        return Err(CliError::Config(
            "invalid parameter `burst_window`: must be > 0".into(),
        ));
    }

    Ok(ResolvedConfig {
        output_dir: PathBuf::from(f.run.output_dir.as_deref().unwrap()),
        quench: f.run.quench.unwrap(),
        mode,
        preset,
        params,
        trajectory,
        workers,
        trajectories,
        grid,
        burst_window,
        file: f,
    })
}

fn build_params(p: &ParamsSection) -> Result<PhysicalParams<f64>, CliError> {
    let params = PhysicalParams {
        n_atoms: p.n_atoms.unwrap(),
        g0: mhz(p.g0.unwrap()),
        omega: mhz(p.omega.unwrap()),
        delta: mhz(p.delta.unwrap()),
        kappa: mhz(p.kappa.unwrap()),
        gamma: mhz(p.gamma.unwrap()),
        alpha: mhz(p.alpha.unwrap()),
        delta_probe: mhz(p.delta_probe.unwrap()),
        n_bubbles: p.n_bubbles.unwrap(),
        n_max: p.n_max.unwrap(),
    };
    params
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(params)
}

fn build_trajectory(t: &TrajectorySection) -> Result<TrajectoryConfig64, CliError> {
    let cfg = TrajectoryConfig64 {
        t_final: t.t_final.unwrap(),
        dt_max: t.dt_max.unwrap(),
        sample_dt: t.sample_dt.unwrap(),
        seed: t.seed.unwrap(),
        jump_time_tol: t.jump_time_tol.unwrap(),
        norm_floor: t.norm_floor.unwrap(),
    };
    cfg.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

/// Contents of `manifest.json`: the fully resolved config plus provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ConfigFile,
    pub seed: u64,
    pub mode: String,
    pub version: String,
    pub wall_time_s: f64,
}
