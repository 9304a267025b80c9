//! Mode dispatch: each run creates the output directory, computes its
//! artifacts inside a worker pool of the configured size, and writes a
//! manifest that reproduces the run when fed back as the config.

use std::time::Instant;

use superatom::dynamics::{
    master_propagate_at, run_ensemble_with, run_trajectory, run_trajectory_with_quench,
    TrajectoryRecord,
};
use superatom::hilbert::{Channel, StateVector};
use superatom::models::{build_ladder_hamiltonian_parts, jump_operators};
use superatom::observables::{burst_statistics, transmission_spectrum};
use superatom::spectral::ladder_spectrum;

use crate::config::{Manifest, Mode, ResolvedConfig};
use crate::{io_err, output, CliError};

/// Execute the run and write all artifacts. Returns the list of files
/// written (relative names).
pub fn run(cfg: &ResolvedConfig) -> Result<Vec<&'static str>, CliError> {
    let started = Instant::now();
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| io_err(&cfg.output_dir, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?;

    let files = pool.install(|| dispatch(cfg))?;

    let manifest = Manifest {
        config: cfg.file.clone(),
        seed: cfg.trajectory.seed,
        mode: cfg.mode.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    output::write_manifest(&cfg.output_dir.join("manifest.json"), &manifest)?;
    Ok(files)
}

fn dispatch(cfg: &ResolvedConfig) -> Result<Vec<&'static str>, CliError> {
    match cfg.mode {
        Mode::Trajectory => run_trajectory_mode(cfg),
        Mode::Ensemble => run_ensemble_mode(cfg),
        Mode::Spectrum => run_spectrum_mode(cfg),
        Mode::Master => run_master_mode(cfg),
        Mode::LadderSpectrum => run_ladder_spectrum_mode(cfg),
    }
}

fn run_trajectory_mode(cfg: &ResolvedConfig) -> Result<Vec<&'static str>, CliError> {
    let (h_free, drive) = build_ladder_hamiltonian_parts(&cfg.params)?;
    let h = h_free.add(&drive)?;
    let jumps = jump_operators(&cfg.params)?;
    let psi0 = StateVector::ground(cfg.params.basis()?);
    let record = if cfg.quench {
        run_trajectory_with_quench(&h, &h_free, &jumps, &psi0, &cfg.trajectory)?
    } else {
        run_trajectory(&h, &jumps, &psi0, &cfg.trajectory)?
    };
    write_trajectory_artifacts(cfg, &record)?;
    Ok(vec!["manifest.json", "record.csv", "clicks.csv"])
}

fn write_trajectory_artifacts(
    cfg: &ResolvedConfig,
    record: &TrajectoryRecord<f64>,
) -> Result<(), CliError> {
    output::write_text(
        &cfg.output_dir.join("record.csv"),
        &output::record_csv(record, true),
    )?;
    output::write_text(
        &cfg.output_dir.join("clicks.csv"),
        &output::clicks_csv(&[(0, record.clicks.events())], false),
    )
}

fn run_ensemble_mode(cfg: &ResolvedConfig) -> Result<Vec<&'static str>, CliError> {
    let (h_free, drive) = build_ladder_hamiltonian_parts(&cfg.params)?;
    let h = h_free.add(&drive)?;
    let jumps = jump_operators(&cfg.params)?;
    let psi0 = StateVector::ground(cfg.params.basis()?);
    let quench_h = cfg.quench.then_some(&h_free);
    let result = run_ensemble_with(
        cfg.trajectories,
        &h,
        quench_h,
        &jumps,
        &psi0,
        &cfg.trajectory,
        &[],
    )?;

    output::write_text(
        &cfg.output_dir.join("record.csv"),
        &output::record_csv(&result.average, false),
    )?;
    let per_traj: Vec<(usize, &[(f64, Channel)])> = result
        .clicks
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.events()))
        .collect();
    output::write_text(
        &cfg.output_dir.join("clicks.csv"),
        &output::clicks_csv(&per_traj, true),
    )?;
    let cavity_clicks: Vec<Vec<f64>> = result
        .clicks
        .iter()
        .map(|c| c.channel_times(Channel::Cavity))
        .collect();
    let hist = burst_statistics(&cavity_clicks, cfg.burst_window)?;
    output::write_text(
        &cfg.output_dir.join("bursts.csv"),
        &output::bursts_csv(&hist),
    )?;
    Ok(vec![
        "manifest.json",
        "record.csv",
        "clicks.csv",
        "bursts.csv",
    ])
}

fn run_spectrum_mode(cfg: &ResolvedConfig) -> Result<Vec<&'static str>, CliError> {
    let spec = transmission_spectrum(&cfg.params, &cfg.grid)?;
    output::write_text(
        &cfg.output_dir.join("spectrum.csv"),
        &output::spectrum_csv(&spec),
    )?;
    Ok(vec!["manifest.json", "spectrum.csv"])
}

fn run_master_mode(cfg: &ResolvedConfig) -> Result<Vec<&'static str>, CliError> {
    let (h_free, drive) = build_ladder_hamiltonian_parts(&cfg.params)?;
    let h = h_free.add(&drive)?;
    let jumps = jump_operators(&cfg.params)?;
    let basis = cfg.params.basis()?;
    let rho0 = superatom::dynamics::DensityMatrix::from_pure(&StateVector::ground(basis))?;

    let n_samples = cfg.trajectory.sample_count();
    let times: Vec<f64> = (0..n_samples)
        .map(|s| s as f64 * cfg.trajectory.sample_dt)
        .collect();
    let states = master_propagate_at(&h, &jumps, &rho0, &times, cfg.trajectory.dt_max)?;

    let number = superatom::hilbert::number_operator::<f64>(basis);
    let levels = basis.ladder_levels();
    let per_level = basis.photon_cutoff() + 1;
    let mut record = TrajectoryRecord {
        sample_times: times.clone(),
        mean_photon: Vec::with_capacity(n_samples),
        ladder_populations: vec![Vec::with_capacity(n_samples); levels],
        clicks: Default::default(),
        seed_used: cfg.trajectory.seed,
    };
    for rho in &states {
        record.mean_photon.push(rho.expectation(&number)?.re);
        let pops = rho.populations();
        for level in 0..levels {
            let p: f64 = pops[level * per_level..(level + 1) * per_level]
                .iter()
                .sum();
            record.ladder_populations[level].push(p);
        }
    }
    output::write_text(
        &cfg.output_dir.join("record.csv"),
        &output::record_csv(&record, false),
    )?;
    Ok(vec!["manifest.json", "record.csv"])
}

fn run_ladder_spectrum_mode(cfg: &ResolvedConfig) -> Result<Vec<&'static str>, CliError> {
    let mut blocks = Vec::new();
    for n_exc in 0..=cfg.params.n_max {
        blocks.push((n_exc, ladder_spectrum(&cfg.params, n_exc)?));
    }
    output::write_text(
        &cfg.output_dir.join("eigenvalues.csv"),
        &output::eigenvalues_csv(&blocks),
    )?;
    Ok(vec!["manifest.json", "eigenvalues.csv"])
}
