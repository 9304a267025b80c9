//! Open-system dynamics: the Monte-Carlo wave-function trajectory engine with
//! quantum jumps, deterministic ensembles, and the Lindblad master-equation
//! propagator and steady-state solver that serve as exact oracles.

mod ensemble;
mod master;
mod trajectory;

pub use ensemble::{run_ensemble, run_ensemble_with, EnsembleResult};
pub use master::{
    master_propagate, master_propagate_at, steady_state, DensityMatrix, MASTER_DIM_CAP,
    STEADY_STATE_DIM_CAP,
};
pub use trajectory::{
    apply_jump, run_trajectory, run_trajectory_stream, run_trajectory_with_quench,
    run_trajectory_with_quench_stream,
};

use crate::error::{Error, Result};
use crate::hilbert::Channel;
use crate::scalar::Scalar;

/// Integration and sampling controls for one stochastic trajectory.
///
/// Between jumps the non-Hermitian Schroedinger equation is integrated with a
/// classical fixed-step 4th-order scheme of step `dt_max`; observables are
/// recorded every `sample_dt`; jump times are localized by bisection to
/// `jump_time_tol`. All times in us.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig<T: Scalar> {
    pub t_final: T,
    pub dt_max: T,
    pub sample_dt: T,
    pub seed: u64,
    pub jump_time_tol: T,
    pub norm_floor: T,
}

impl<T: Scalar> TrajectoryConfig<T> {
    /// Config with the default jump tolerance dt_max/100 and norm floor 1e-15.
    pub fn new(t_final: T, dt_max: T, sample_dt: T, seed: u64) -> Result<Self> {
        let cfg = Self {
            t_final,
            dt_max,
            sample_dt,
            seed,
            jump_time_tol: dt_max * T::of(1e-2),
            norm_floor: T::of(1e-15),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_max > T::zero()) {
            return Err(Error::parameter("dt_max", "must be > 0"));
        }
        if self.sample_dt < self.dt_max {
            return Err(Error::parameter("sample_dt", "must be >= dt_max"));
        }
        if self.t_final < self.sample_dt {
            return Err(Error::parameter("t_final", "must be >= sample_dt"));
        }
        if !(self.jump_time_tol > T::zero()) || self.jump_time_tol > self.dt_max * T::of(0.1) {
            return Err(Error::parameter(
                "jump_time_tol",
                "must be in (0, dt_max/10]",
            ));
        }
        if !(self.norm_floor > T::zero()) || self.norm_floor >= T::of(1e-3) {
            return Err(Error::parameter("norm_floor", "must be in (0, 1e-3)"));
        }
        Ok(())
    }

    /// Number of recorded samples, at times 0, sample_dt, 2 sample_dt, ...
    pub fn sample_count(&self) -> usize {
        (self.t_final / self.sample_dt).to64().floor() as usize + 1
    }
}

/// Time-stamped detector clicks of one trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClickRecord<T: Scalar> {
    events: Vec<(T, Channel)>,
}

impl<T: Scalar> ClickRecord<T> {
    pub fn new() -> Self {
        Self { events: Vec::new() }
    }

    pub(crate) fn push(&mut self, t: T, channel: Channel) {
        debug_assert!(
            self.events.last().map_or(true, |&(prev, _)| prev < t),
            "click times must be strictly increasing"
        );
        self.events.push((t, channel));
    }

    #[cfg(test)]
    pub(crate) fn push_for_test(&mut self, t: T, channel: Channel) {
        self.push(t, channel);
    }

    pub fn events(&self) -> &[(T, Channel)] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Click times on one channel.
    pub fn channel_times(&self, channel: Channel) -> Vec<T> {
        self.events
            .iter()
            .filter(|&&(_, c)| c == channel)
            .map(|&(t, _)| t)
            .collect()
    }

    pub fn validate(&self, t_final: T) -> Result<()> {
        let mut prev: Option<T> = None;
        for &(t, _) in &self.events {
            if t < T::zero() || t > t_final {
                return Err(Error::parameter(
                    "clicks",
                    "click time outside [0, t_final]",
                ));
            }
            if let Some(p) = prev {
                if t <= p {
                    return Err(Error::parameter("clicks", "click times not increasing"));
                }
            }
            prev = Some(t);
        }
        Ok(())
    }
}

/// Sampled observables and clicks of one trajectory (or, for ensembles, the
/// deterministic average with an empty click list).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord<T: Scalar> {
    pub sample_times: Vec<T>,
    /// <a^dag a>(t) of the normalized conditional state.
    pub mean_photon: Vec<T>,
    /// Ladder-level populations, indexed [level][sample].
    pub ladder_populations: Vec<Vec<T>>,
    pub clicks: ClickRecord<T>,
    pub seed_used: u64,
}

impl<T: Scalar> TrajectoryRecord<T> {
    pub fn levels(&self) -> usize {
        self.ladder_populations.len()
    }
}
