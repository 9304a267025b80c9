//! Artifact writers. Every file starts with a `#` comment line declaring the
//! column units, followed by a CSV header and rows. Floats are written with
//! Rust's shortest round-trip formatting, so identical runs produce byte-
//! identical files.

use std::fmt::Write as _;
use std::path::Path;

use superatom::dynamics::TrajectoryRecord;
use superatom::hilbert::Channel;
use superatom::observables::{BurstHistogram, SpectrumResult};

use crate::config::Manifest;
use crate::{io_err, CliError};

pub fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| io_err(path, e))
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::Config(format!("manifest serialization failed: {e}")))?;
    write_text(path, &json)
}

/// record.csv: sampled observables of a trajectory (with a click marker per
/// sample bin) or of an ensemble average / master propagation (without one).
pub fn record_csv(record: &TrajectoryRecord<f64>, with_click_column: bool) -> String {
    let levels = record.levels();
    let mut out = String::new();
    out.push_str("# units: t_us [us]; mean_photon, pop_E* [dimensionless]");
    if with_click_column {
        out.push_str("; click [1 if a detection occurred since the previous sample]");
    }
    out.push('\n');
    out.push_str("t_us,mean_photon");
    for level in 1..levels {
        let _ = write!(out, ",pop_E{level}");
    }
    if with_click_column {
        out.push_str(",click");
    }
    out.push('\n');

    let click_times: Vec<f64> = record.clicks.events().iter().map(|&(t, _)| t).collect();
    let mut click_cursor = 0usize;
    for (s, &t) in record.sample_times.iter().enumerate() {
        let _ = write!(out, "{t},{}", record.mean_photon[s]);
        for level in 1..levels {
            let _ = write!(out, ",{}", record.ladder_populations[level][s]);
        }
        if with_click_column {
            let mut clicked = 0u8;
            while click_cursor < click_times.len() && click_times[click_cursor] <= t {
                clicked = 1;
                click_cursor += 1;
            }
            let _ = write!(out, ",{clicked}");
        }
        out.push('\n');
    }
    out
}

/// clicks.csv: time-stamped detector clicks; the trajectory column appears
/// for ensembles.
pub fn clicks_csv(per_trajectory: &[(usize, &[(f64, Channel)])], with_trajectory: bool) -> String {
    let mut out = String::new();
    out.push_str("# units: t_us [us]; channel [cavity|rydberg]");
    if with_trajectory {
        out.push_str("; trajectory [index]");
    }
    out.push('\n');
    out.push_str(if with_trajectory {
        "t_us,channel,trajectory\n"
    } else {
        "t_us,channel\n"
    });
    for (index, events) in per_trajectory {
        for &(t, channel) in *events {
            if with_trajectory {
                let _ = writeln!(out, "{t},{},{index}", channel.label());
            } else {
                let _ = writeln!(out, "{t},{}", channel.label());
            }
        }
    }
    out
}

/// spectrum.csv: steady-state sweep.
pub fn spectrum_csv(spec: &SpectrumResult<f64>) -> String {
    let mut out = String::new();
    out.push_str(
        "# units: delta_rad_per_us [rad/us]; mean_photon_ss, g2_zero [dimensionless]; \
         flux [photons/us]\n",
    );
    out.push_str("delta_rad_per_us,mean_photon_ss,flux,g2_zero\n");
    for i in 0..spec.detunings.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            spec.detunings[i], spec.mean_photon_ss[i], spec.output_flux[i], spec.g2_zero[i]
        );
    }
    out
}

/// bursts.csv: burst-size histogram.
pub fn bursts_csv(hist: &BurstHistogram<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# units: multiplicity [clicks per burst], count [bursts]; window = {} us",
        hist.window
    );
    out.push_str("multiplicity,count\n");
    for (multiplicity, count) in &hist.counts {
        let _ = writeln!(out, "{multiplicity},{count}");
    }
    out
}

/// eigenvalues.csv: excitation-block spectra; `block` indexes the eigenvalue
/// inside its block (ascending).
pub fn eigenvalues_csv(blocks: &[(usize, Vec<f64>)]) -> String {
    let mut out = String::new();
    out.push_str("# units: block, n_exc [index]; value [rad/us]\n");
    out.push_str("block,n_exc,value\n");
    for (n_exc, values) in blocks {
        for (i, v) in values.iter().enumerate() {
            let _ = writeln!(out, "{i},{n_exc},{v}");
        }
    }
    out
}
