//! Post-processing of trajectories and density matrices into measurable
//! quantities: transmission spectra, conditional photon numbers, waiting-time
//! and burst statistics, intensity correlations.
//!
//! Everything here is pure post-processing over immutable records; the only
//! parallelism is an order-preserving map over spectrum grid points.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::dynamics::{steady_state, DensityMatrix, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, number_operator, BasisSpec, Channel, SparseOperator};
use crate::models::{build_ladder_hamiltonian, jump_operators, PhysicalParams};
use crate::scalar::Scalar;
use crate::stats;

/// Steady-state response over a probe-detuning sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<T: Scalar> {
    pub detunings: Vec<T>,
    pub mean_photon_ss: Vec<T>,
    /// Detected photon flux kappa <n>, per us.
    pub output_flux: Vec<T>,
    pub g2_zero: Vec<T>,
}

/// Steady-state transmission spectrum: for each probe detuning, the
/// stationary photon number, the output flux kappa <n> and the zero-delay
/// intensity correlation from the density-matrix formula.
pub fn transmission_spectrum<T: Scalar>(
    p: &PhysicalParams<T>,
    detunings: &[T],
) -> Result<SpectrumResult<T>> {
    if detunings.is_empty() {
        return Err(Error::parameter("detunings", "grid must be non-empty"));
    }
    p.validate()?;
    let basis = p.basis()?;
    let number = number_operator::<T>(basis);
    let pair = pair_operator::<T>(basis);

    let points: Vec<(T, T)> = detunings
        .par_iter()
        .map(|&delta| -> Result<(T, T)> {
            let mut params = p.clone();
            params.delta_probe = delta;
            let point = || -> Result<(T, T)> {
                let h = build_ladder_hamiltonian(&params)?;
                let jumps = jump_operators(&params)?;
                let rho = steady_state(&h, &jumps)?;
                let n = rho.expectation(&number)?.re;
                let nn = rho.expectation(&pair)?.re;
                let g2 = if n * n > T::of(1e-30) {
                    nn / (n * n)
                } else {
                    T::zero()
                };
                Ok((n.max(T::zero()), g2))
            };
            point().map_err(|e| Error::SpectrumPoint {
                delta_rad_per_us: delta.to64(),
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mean_photon_ss: Vec<T> = points.iter().map(|&(n, _)| n).collect();
    let output_flux: Vec<T> = mean_photon_ss.iter().map(|&n| p.kappa * n).collect();
    let g2_zero: Vec<T> = points.iter().map(|&(_, g)| g).collect();
    Ok(SpectrumResult {
        detunings: detunings.to_vec(),
        mean_photon_ss,
        output_flux,
        g2_zero,
    })
}

/// a^dag a^dag a a = n(n-1), the pair-counting operator.
pub fn pair_operator<T: Scalar>(basis: BasisSpec) -> SparseOperator<T> {
    let a = annihilation::<T>(basis);
    let a2 = a.matmul(&a).expect("same dimension");
    a2.dagger().matmul(&a2).expect("same dimension")
}

/// Zero-delay intensity correlation from a density matrix,
/// <a^dag a^dag a a> / <a^dag a>^2.
pub fn g2_zero_from_density<T: Scalar>(rho: &DensityMatrix<T>, basis: BasisSpec) -> Result<T> {
    let n = rho.expectation(&number_operator::<T>(basis))?.re;
    let nn = rho.expectation(&pair_operator::<T>(basis))?.re;
    if !(n * n > T::zero()) {
        return Err(Error::InsufficientData(
            "zero mean photon number, g2 undefined".into(),
        ));
    }
    Ok(nn / (n * n))
}

/// Strict local maxima of a sampled curve.
pub fn find_peaks<T: Scalar>(values: &[T]) -> Vec<usize> {
    let mut peaks = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        if values[i] > values[i - 1] && values[i] > values[i + 1] {
            peaks.push(i);
        }
    }
    peaks
}

/// Full width at half maximum of the peak at `peak`, by linear interpolation
/// on both flanks. None when a flank never drops below half maximum.
pub fn fwhm<T: Scalar>(xs: &[T], values: &[T], peak: usize) -> Option<T> {
    let half = values[peak] * T::of(0.5);
    let mut left = None;
    for i in (1..=peak).rev() {
        if values[i - 1] <= half && values[i] > half {
            let frac = (half - values[i - 1]) / (values[i] - values[i - 1]);
            left = Some(xs[i - 1] + (xs[i] - xs[i - 1]) * frac);
            break;
        }
    }
    let mut right = None;
    for i in peak..values.len() - 1 {
        if values[i] > half && values[i + 1] <= half {
            let frac = (values[i] - half) / (values[i] - values[i + 1]);
            right = Some(xs[i] + (xs[i + 1] - xs[i]) * frac);
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        _ => None,
    }
}

/// Average of <n>(t_click + tau) over all cavity clicks of the ensemble, one
/// value per delay. Samples are looked up at the first grid point at or
/// after t_click + tau, which for tau -> 0+ is the first post-collapse
/// sample.
pub fn conditional_mean_photon_after_click<T: Scalar>(
    records: &[TrajectoryRecord<T>],
    delays: &[T],
) -> Result<Vec<T>> {
    let mut acc = ConditionalMeanAccumulator::new(delays.to_vec(), T::zero());
    for record in records {
        acc.add_record(record)?;
    }
    acc.finish()
}

/// Streaming accumulator behind [`conditional_mean_photon_after_click`]:
/// records can be folded in one at a time and dropped, which keeps large
/// ensembles out of memory. Clicks before `t_min` are ignored (transient
/// discard).
#[derive(Debug, Clone)]
pub struct ConditionalMeanAccumulator<T: Scalar> {
    delays: Vec<T>,
    t_min: T,
    sums: Vec<T>,
    counts: Vec<u64>,
    clicks_used: u64,
}

impl<T: Scalar> ConditionalMeanAccumulator<T> {
    pub fn new(delays: Vec<T>, t_min: T) -> Self {
        let n = delays.len();
        Self {
            delays,
            t_min,
            sums: vec![T::zero(); n],
            counts: vec![0; n],
            clicks_used: 0,
        }
    }

    pub fn add_record(&mut self, record: &TrajectoryRecord<T>) -> Result<()> {
        let ts = &record.sample_times;
        if ts.len() < 2 {
            return Err(Error::InsufficientData("record carries < 2 samples".into()));
        }
        let sample_dt = ts[1] - ts[0];
        let n_samples = ts.len();
        for &t_click in &record.clicks.channel_times(Channel::Cavity) {
            if t_click < self.t_min {
                continue;
            }
            self.clicks_used += 1;
            for (d, &tau) in self.delays.iter().enumerate() {
                let idx = ((t_click + tau) / sample_dt).to64().ceil() as usize;
                if idx < n_samples {
                    self.sums[d] = self.sums[d] + record.mean_photon[idx];
                    self.counts[d] += 1;
                }
            }
        }
        Ok(())
    }

    pub fn clicks_used(&self) -> u64 {
        self.clicks_used
    }

    pub fn finish(self) -> Result<Vec<T>> {
        if self.clicks_used == 0 {
            return Err(Error::InsufficientData(
                "no cavity clicks in the ensemble".into(),
            ));
        }
        Ok(self
            .sums
            .into_iter()
            .zip(self.counts)
            .map(|(s, c)| if c > 0 { s / T::of(c as f64) } else { T::nan() })
            .collect())
    }
}

/// Histogram of consecutive inter-click intervals, pooled across
/// trajectories. Intervals beyond the last edge land in `overflow`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaitingTimeHistogram<T: Scalar> {
    pub edges: Vec<T>,
    pub counts: Vec<u64>,
    pub overflow: u64,
    pub total_intervals: u64,
}

pub fn waiting_time_histogram<T: Scalar>(
    click_times: &[Vec<T>],
    edges: &[T],
) -> Result<WaitingTimeHistogram<T>> {
    if edges.len() < 2 || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::parameter("edges", "need >= 2 increasing bin edges"));
    }
    let intervals = pooled_intervals(click_times);
    if intervals.is_empty() {
        return Err(Error::InsufficientData(
            "fewer than 2 clicks in every trajectory".into(),
        ));
    }
    let mut counts = vec![0u64; edges.len() - 1];
    let mut overflow = 0u64;
    for &dt in &intervals {
        if dt < edges[0] {
            continue;
        }
        match edges.windows(2).position(|w| dt >= w[0] && dt < w[1]) {
            Some(bin) => counts[bin] += 1,
            None => overflow += 1,
        }
    }
    Ok(WaitingTimeHistogram {
        edges: edges.to_vec(),
        counts,
        overflow,
        total_intervals: intervals.len() as u64,
    })
}

/// Consecutive inter-click intervals of each trajectory, pooled.
pub fn pooled_intervals<T: Scalar>(click_times: &[Vec<T>]) -> Vec<T> {
    let mut out = Vec::new();
    for times in click_times {
        for w in times.windows(2) {
            out.push(w[1] - w[0]);
        }
    }
    out
}

/// Burst-size histogram: clicks closer than `window` to their predecessor
/// belong to the same burst.
#[derive(Debug, Clone, PartialEq)]
pub struct BurstHistogram<T: Scalar> {
    pub window: T,
    /// multiplicity -> number of bursts of that size
    pub counts: BTreeMap<usize, u64>,
}

impl<T: Scalar> BurstHistogram<T> {
    pub fn total_clicks(&self) -> u64 {
        self.counts.iter().map(|(&m, &c)| m as u64 * c).sum()
    }

    pub fn total_bursts(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn mean_multiplicity(&self) -> f64 {
        let bursts = self.total_bursts();
        if bursts == 0 {
            return f64::NAN;
        }
        self.total_clicks() as f64 / bursts as f64
    }

    pub fn max_multiplicity(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }
}

/// Greedy burst clustering of each trajectory's clicks, merged across the
/// ensemble. Total clicks are conserved: sum over multiplicities m of
/// m * counts[m] equals the number of input clicks.
pub fn burst_statistics<T: Scalar>(click_times: &[Vec<T>], window: T) -> Result<BurstHistogram<T>> {
    if !(window > T::zero()) {
        return Err(Error::parameter("window", "must be > 0"));
    }
    let mut counts = BTreeMap::new();
    for times in click_times {
        let mut current = 0usize;
        let mut prev: Option<T> = None;
        for &t in times {
            match prev {
                Some(p) if t - p <= window => current += 1,
                Some(_) => {
                    *counts.entry(current).or_insert(0) += 1;
                    current = 1;
                }
                None => current = 1,
            }
            prev = Some(t);
        }
        if current > 0 {
            *counts.entry(current).or_insert(0) += 1;
        }
    }
    Ok(BurstHistogram { window, counts })
}

/// Click-based estimate of the zero-delay intensity correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Estimate<T: Scalar> {
    pub value: T,
    /// Bootstrap standard error over trajectories.
    pub std_err: T,
    pub n_clicks: u64,
    pub n_pairs: u64,
    /// Set when fewer than 100 clicks entered the estimate.
    pub insufficient_statistics: bool,
}

/// Coincidence estimator of g2(0): ordered click pairs closer than `window`,
/// normalized by the squared average rate, pooled over trajectories of equal
/// observation time `t_obs`. The standard error comes from a bootstrap over
/// trajectories.
pub fn g2_zero_from_clicks<T: Scalar>(
    click_times: &[Vec<T>],
    t_obs: T,
    window: T,
) -> Result<G2Estimate<T>> {
    if click_times.is_empty() {
        return Err(Error::InsufficientData("no trajectories".into()));
    }
    if !(window > T::zero()) || !(t_obs > window) {
        return Err(Error::parameter("window", "need 0 < window < t_obs"));
    }
    let t = t_obs.to64();
    let w = window.to64();
    let per_traj: Vec<(f64, f64)> = click_times
        .iter()
        .map(|times| {
            let n = times.len() as f64;
            (n, close_pairs(times, window) as f64)
        })
        .collect();

    let estimate = |idx: &[usize]| -> f64 {
        let mut n_total = 0f64;
        let mut pairs = 0f64;
        for &i in idx {
            n_total += per_traj[i].0;
            pairs += per_traj[i].1;
        }
        let m_sel = idx.len() as f64;
        if n_total < 2.0 {
            return f64::NAN;
        }
        pairs * m_sel * t / (n_total * n_total * w)
    };

    let all: Vec<usize> = (0..click_times.len()).collect();
    let value = estimate(&all);
    let n_clicks: u64 = per_traj.iter().map(|&(n, _)| n as u64).sum();
    let n_pairs: u64 = per_traj.iter().map(|&(_, p)| p as u64).sum();
    if !value.is_finite() {
        return Err(Error::InsufficientData(format!(
            "{n_clicks} clicks are not enough for a g2 estimate"
        )));
    }
    let std_err = stats::bootstrap_std_err(click_times.len(), 200, 0x67320, estimate);
    Ok(G2Estimate {
        value: T::of(value),
        std_err: T::of(std_err),
        n_clicks,
        n_pairs,
        insufficient_statistics: n_clicks < 100,
    })
}

/// Ordered pairs (i < j) with t_j - t_i <= window.
fn close_pairs<T: Scalar>(times: &[T], window: T) -> u64 {
    let mut pairs = 0u64;
    let mut lo = 0usize;
    for (j, &tj) in times.iter().enumerate() {
        while tj - times[lo] > window {
            lo += 1;
        }
        pairs += (j - lo) as u64;
    }
    pairs
}

/// Cavity-channel click times of each record, shifted to start at `t_start`
/// (clicks before it are dropped). Returns the per-trajectory lists and the
/// common observation time.
pub fn steady_state_clicks<T: Scalar>(
    records: &[TrajectoryRecord<T>],
    t_start: T,
    t_final: T,
) -> (Vec<Vec<T>>, T) {
    let lists = records
        .iter()
        .map(|r| {
            r.clicks
                .channel_times(Channel::Cavity)
                .into_iter()
                .filter(|&t| t >= t_start)
                .map(|t| t - t_start)
                .collect()
        })
        .collect();
    (lists, t_final - t_start)
}
