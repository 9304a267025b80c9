//! Ensembles of independent trajectories with a deterministic merge.
//!
//! Trajectory i draws from the ChaCha stream (seed, i), so the ensemble is
//! reproducible under any degree of parallelism. Averages are accumulated in
//! fixed-size batches, sequentially inside each batch and sequentially across
//! batches, which pins the floating-point summation order: the merged result
//! is bit-identical no matter how many workers rayon schedules.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{JumpOperator, SparseOperator, StateVector};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

use super::trajectory::run_single;
use super::{ClickRecord, DensityMatrix, TrajectoryConfig, TrajectoryRecord};

const BATCH: usize = 16;

/// Averaged observables plus the raw per-trajectory click records.
#[derive(Debug, Clone)]
pub struct EnsembleResult<T: Scalar> {
    /// Ensemble mean of the sampled observables; its click list is empty.
    pub average: TrajectoryRecord<T>,
    /// Per-trajectory clicks, ordered by trajectory index.
    pub clicks: Vec<ClickRecord<T>>,
    /// Ensemble-averaged projector <|psi><psi|> at each requested checkpoint.
    pub densities: Vec<DensityMatrix<T>>,
}

/// Average `count` independent trajectories of the same problem.
pub fn run_ensemble<T: Scalar>(
    count: usize,
    h: &SparseOperator<T>,
    jumps: &[JumpOperator<T>],
    psi0: &StateVector<T>,
    cfg: &TrajectoryConfig<T>,
) -> Result<EnsembleResult<T>> {
    run_ensemble_with(count, h, None, jumps, psi0, cfg, &[])
}

/// Full ensemble entry point: optional drive quench at the first cavity
/// click of each trajectory, and optional density-matrix checkpoints (times
/// snapped to the sample grid) for oracle comparisons.
pub fn run_ensemble_with<T: Scalar>(
    count: usize,
    h: &SparseOperator<T>,
    h_quenched: Option<&SparseOperator<T>>,
    jumps: &[JumpOperator<T>],
    psi0: &StateVector<T>,
    cfg: &TrajectoryConfig<T>,
    density_checkpoints: &[T],
) -> Result<EnsembleResult<T>> {
    if count == 0 {
        return Err(Error::parameter("count", "ensemble needs >= 1 trajectory"));
    }
    cfg.validate()?;
    let n_samples = cfg.sample_count();
    let mut checkpoint_samples: Vec<usize> = density_checkpoints
        .iter()
        .map(|&t| {
            let idx = (t / cfg.sample_dt).to64().round() as isize;
            if idx < 0 || idx as usize >= n_samples {
                Err(Error::parameter(
                    "density_checkpoints",
                    format!("checkpoint {t} outside the sample grid"),
                ))
            } else {
                Ok(idx as usize)
            }
        })
        .collect::<Result<_>>()?;
    checkpoint_samples.sort_unstable();
    checkpoint_samples.dedup();

    let n_batches = count.div_ceil(BATCH);
    let batches: Vec<BatchAccum<T>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let lo = b * BATCH;
            let hi = ((b + 1) * BATCH).min(count);
            let mut acc = BatchAccum::<T>::empty();
            for index in lo..hi {
                let run = run_single(
                    h,
                    h_quenched,
                    jumps,
                    psi0,
                    cfg,
                    index as u64,
                    &checkpoint_samples,
                )
                .map_err(|e| Error::Trajectory {
                    index,
                    source: Box::new(e),
                })?;
                acc.absorb(run.record, run.densities);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = BatchAccum::<T>::empty();
    for batch in batches {
        total.merge(batch);
    }

    let inv = T::of(count as f64).recip();
    let mut average = total.sum_record.expect("count >= 1 trajectory");
    for v in average.mean_photon.iter_mut() {
        *v = *v * inv;
    }
    for pops in average.ladder_populations.iter_mut() {
        for v in pops.iter_mut() {
            *v = *v * inv;
        }
    }
    average.clicks = ClickRecord::new();
    average.seed_used = cfg.seed;

    let densities = total
        .sum_densities
        .into_iter()
        .map(|m| DensityMatrix::from_matrix(m.scale(num_complex::Complex::new(inv, T::zero()))))
        .collect::<Result<Vec<_>>>()?;

    Ok(EnsembleResult {
        average,
        clicks: total.clicks,
        densities,
    })
}

struct BatchAccum<T: Scalar> {
    sum_record: Option<TrajectoryRecord<T>>,
    sum_densities: Vec<Matrix<T>>,
    clicks: Vec<ClickRecord<T>>,
}

impl<T: Scalar> BatchAccum<T> {
    fn empty() -> Self {
        Self {
            sum_record: None,
            sum_densities: Vec::new(),
            clicks: Vec::new(),
        }
    }

    fn absorb(&mut self, record: TrajectoryRecord<T>, densities: Vec<Matrix<T>>) {
        self.clicks.push(record.clicks.clone());
        match &mut self.sum_record {
            None => {
                self.sum_record = Some(record);
                self.sum_densities = densities;
            }
            Some(sum) => {
                for (a, b) in sum.mean_photon.iter_mut().zip(&record.mean_photon) {
                    *a = *a + *b;
                }
                for (ap, bp) in sum
                    .ladder_populations
                    .iter_mut()
                    .zip(&record.ladder_populations)
                {
                    for (a, b) in ap.iter_mut().zip(bp) {
                        *a = *a + *b;
                    }
                }
                for (am, bm) in self.sum_densities.iter_mut().zip(densities) {
                    *am = am.add(&bm);
                }
            }
        }
    }

    fn merge(&mut self, other: Self) {
        match (&mut self.sum_record, other.sum_record) {
            (None, Some(rec)) => {
                self.sum_record = Some(rec);
                self.sum_densities = other.sum_densities;
            }
            (Some(sum), Some(rec)) => {
                for (a, b) in sum.mean_photon.iter_mut().zip(&rec.mean_photon) {
                    *a = *a + *b;
                }
                for (ap, bp) in sum
                    .ladder_populations
                    .iter_mut()
                    .zip(&rec.ladder_populations)
                {
                    for (a, b) in ap.iter_mut().zip(bp) {
                        *a = *a + *b;
                    }
                }
                for (am, bm) in self.sum_densities.iter_mut().zip(other.sum_densities) {
                    *am = am.add(&bm);
                }
            }
            (_, None) => {}
        }
        self.clicks.extend(other.clicks);
    }
}
