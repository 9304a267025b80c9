//! Monte-Carlo wave-function engine: deterministic non-Hermitian evolution
//! punctuated by quantum jumps.
//!
//! Waiting-time unraveling: draw r uniform in (0, 1], integrate
//! dpsi/dt = -i H_eff psi with H_eff = H - (i/2) sum_m C_m^dag C_m until
//! ||psi||^2 crosses r, localize the crossing by bisection, select a channel
//! with probability proportional to <psi|C_m^dag C_m|psi>, apply the collapse
//! and renormalize, then redraw r. Jump statistics are exact in the step size
//! (no first-order-in-dt approximation).

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::{Channel, JumpOperator, SparseOperator, StateVector};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

use super::{ClickRecord, TrajectoryConfig, TrajectoryRecord};

/// Collapse and renormalize: C|psi> / ||C|psi>||. Errors when the channel has
/// no weight on |psi>.
pub fn apply_jump<T: Scalar>(
    c: &SparseOperator<T>,
    psi: &StateVector<T>,
) -> Result<StateVector<T>> {
    c.apply(psi)?.normalized()
}

/// Run one trajectory with RNG stream 0.
pub fn run_trajectory<T: Scalar>(
    h: &SparseOperator<T>,
    jumps: &[JumpOperator<T>],
    psi0: &StateVector<T>,
    cfg: &TrajectoryConfig<T>,
) -> Result<TrajectoryRecord<T>> {
    Ok(run_single(h, None, jumps, psi0, cfg, 0, &[])?.record)
}

/// Run the trajectory with the given ensemble index: the RNG stream is
/// (cfg.seed, index), exactly as inside [`super::run_ensemble`]. Useful for
/// streaming over large ensembles without holding every record in memory.
pub fn run_trajectory_stream<T: Scalar>(
    h: &SparseOperator<T>,
    jumps: &[JumpOperator<T>],
    psi0: &StateVector<T>,
    cfg: &TrajectoryConfig<T>,
    index: u64,
) -> Result<TrajectoryRecord<T>> {
    Ok(run_single(h, None, jumps, psi0, cfg, index, &[])?.record)
}

/// Stream-indexed variant of [`run_trajectory_with_quench`].
pub fn run_trajectory_with_quench_stream<T: Scalar>(
    h: &SparseOperator<T>,
    h_quenched: &SparseOperator<T>,
    jumps: &[JumpOperator<T>],
    psi0: &StateVector<T>,
    cfg: &TrajectoryConfig<T>,
    index: u64,
) -> Result<TrajectoryRecord<T>> {
    Ok(run_single(h, Some(h_quenched), jumps, psi0, cfg, index, &[])?.record)
}

/// Like [`run_trajectory`], but swaps the Hamiltonian to `h_quenched` at the
/// first cavity click (the probe amplitude set to zero after the first
/// detection).
pub fn run_trajectory_with_quench<T: Scalar>(
    h: &SparseOperator<T>,
    h_quenched: &SparseOperator<T>,
    jumps: &[JumpOperator<T>],
    psi0: &StateVector<T>,
    cfg: &TrajectoryConfig<T>,
) -> Result<TrajectoryRecord<T>> {
    Ok(run_single(h, Some(h_quenched), jumps, psi0, cfg, 0, &[])?.record)
}

/// Full output of one trajectory, including internals the public wrappers
/// drop.
pub(super) struct SingleRun<T: Scalar> {
    pub record: TrajectoryRecord<T>,
    /// Projector of the normalized state at each requested sample index.
    pub densities: Vec<Matrix<T>>,
    /// Unnormalized squared norm at t_final (1 when no decay channels act).
    #[cfg_attr(not(test), allow(dead_code))]
    pub final_norm_sq: T,
}

/// Effective non-Hermitian generator H - (i/2) sum_m C_m^dag C_m.
pub(super) fn effective_hamiltonian<T: Scalar>(
    h: &SparseOperator<T>,
    jumps: &[JumpOperator<T>],
) -> Result<SparseOperator<T>> {
    let mut h_eff = h.clone();
    let half_i = Complex::new(T::zero(), T::of(0.5));
    for j in jumps {
        let cdagc = j.op.dagger().matmul(&j.op)?;
        h_eff = h_eff.sub(&cdagc.scale(half_i))?;
    }
    Ok(h_eff)
}

/// One trajectory on RNG stream `stream`, optionally accumulating the
/// projector |psi><psi| of the normalized state at the given sample indices.
pub(super) fn run_single<T: Scalar>(
    h: &SparseOperator<T>,
    h_quenched: Option<&SparseOperator<T>>,
    jumps: &[JumpOperator<T>],
    psi0: &StateVector<T>,
    cfg: &TrajectoryConfig<T>,
    stream: u64,
    density_samples: &[usize],
) -> Result<SingleRun<T>> {
    cfg.validate()?;
    let dim = h.dimension();
    if psi0.dimension() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: psi0.dimension(),
        });
    }
    let scale = T::one().max(largest_entry(h));
    if h.hermiticity_defect() > T::tol_exact() * scale {
        return Err(Error::parameter("h", "Hamiltonian must be Hermitian"));
    }
    if (psi0.norm() - T::one()).abs() > T::tol_exact().sqrt() {
        return Err(Error::parameter("psi0", "initial state must be normalized"));
    }

    let h_eff = effective_hamiltonian(h, jumps)?;
    let h_eff_quenched = match h_quenched {
        Some(hq) => Some(effective_hamiltonian(hq, jumps)?),
        None => None,
    };

    let basis = psi0.basis();
    let photon_diag: Vec<T> = (0..dim)
        .map(|i| T::of(basis.unflatten(i).expect("index in range").1 as f64))
        .collect();
    let levels = basis.ladder_levels();
    let per_level = basis.photon_cutoff() + 1;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);

    let mut engine = Engine {
        h_eff: &h_eff,
        quench_pending: h_eff_quenched.as_ref(),
        jumps,
        cfg,
        psi: psi0.amplitudes().to_vec(),
        norm_sq: psi0.norm_sqr(),
        threshold: draw_threshold::<T>(&mut rng),
        rng,
        clicks: ClickRecord::new(),
        k1: vec![Complex::new(T::zero(), T::zero()); dim],
        k2: vec![Complex::new(T::zero(), T::zero()); dim],
        k3: vec![Complex::new(T::zero(), T::zero()); dim],
        k4: vec![Complex::new(T::zero(), T::zero()); dim],
        stage: vec![Complex::new(T::zero(), T::zero()); dim],
        out: vec![Complex::new(T::zero(), T::zero()); dim],
        jump_buf: vec![Complex::new(T::zero(), T::zero()); dim],
    };

    let n_samples = cfg.sample_count();
    let mut record = TrajectoryRecord {
        sample_times: Vec::with_capacity(n_samples),
        mean_photon: Vec::with_capacity(n_samples),
        ladder_populations: vec![Vec::with_capacity(n_samples); levels],
        clicks: ClickRecord::new(),
        seed_used: cfg.seed,
    };
    let mut densities: Vec<Matrix<T>> = Vec::with_capacity(density_samples.len());

    let sample = |engine: &Engine<T>,
                  record: &mut TrajectoryRecord<T>,
                  densities: &mut Vec<Matrix<T>>,
                  s: usize,
                  t: T|
     -> Result<()> {
        let inv_norm_sq = engine.norm_sq.recip();
        let mut mean_n = T::zero();
        let mut pops = vec![T::zero(); levels];
        for (i, a) in engine.psi.iter().enumerate() {
            let w = a.norm_sqr() * inv_norm_sq;
            mean_n = mean_n + photon_diag[i] * w;
            pops[i / per_level] = pops[i / per_level] + w;
        }
        if !mean_n.is_finite() {
            return Err(Error::NonFinite("trajectory sample"));
        }
        let pop_sum: T = pops.iter().copied().sum();
        debug_assert!((pop_sum - T::one()).abs() < T::of(1e-9).max(T::tol_exact()));
        record.sample_times.push(t);
        record.mean_photon.push(mean_n);
        for (level, &p) in pops.iter().enumerate() {
            record.ladder_populations[level].push(p);
        }
        if density_samples.contains(&s) {
            let inv = engine.norm_sq.sqrt().recip();
            let mut rho = Matrix::zeros(dim);
            for r in 0..dim {
                for c in 0..dim {
                    rho[(r, c)] = engine.psi[r].scale(inv) * engine.psi[c].scale(inv).conj();
                }
            }
            densities.push(rho);
        }
        Ok(())
    };

    sample(&engine, &mut record, &mut densities, 0, T::zero())?;
    for s in 1..n_samples {
        let t_start = cfg.sample_dt * T::of((s - 1) as f64);
        engine.advance(cfg.sample_dt, t_start)?;
        sample(
            &engine,
            &mut record,
            &mut densities,
            s,
            cfg.sample_dt * T::of(s as f64),
        )?;
    }
    // tail past the last sample grid point, clicks still recorded
    let t_last = cfg.sample_dt * T::of((n_samples - 1) as f64);
    let tail = cfg.t_final - t_last;
    if tail > cfg.dt_max * T::of(1e-9) {
        engine.advance(tail, t_last)?;
    }

    let final_norm_sq = engine.norm_sq;
    record.clicks = engine.clicks;
    record.clicks.validate(cfg.t_final)?;
    Ok(SingleRun {
        record,
        densities,
        final_norm_sq,
    })
}

fn largest_entry<T: Scalar>(op: &SparseOperator<T>) -> T {
    op.entries()
        .iter()
        .map(|&(_, _, v)| v.norm_sqr().sqrt())
        .fold(T::zero(), T::max)
}

fn draw_threshold<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    // 1 - u in (0, 1]; survival probability the next jump waits for
    T::of(1.0 - rng.gen::<f64>())
}

struct Engine<'a, T: Scalar> {
    h_eff: &'a SparseOperator<T>,
    /// Effective Hamiltonian to switch to at the first cavity click.
    quench_pending: Option<&'a SparseOperator<T>>,
    jumps: &'a [JumpOperator<T>],
    cfg: &'a TrajectoryConfig<T>,
    psi: Vec<Complex<T>>,
    norm_sq: T,
    threshold: T,
    rng: ChaCha8Rng,
    clicks: ClickRecord<T>,
    k1: Vec<Complex<T>>,
    k2: Vec<Complex<T>>,
    k3: Vec<Complex<T>>,
    k4: Vec<Complex<T>>,
    stage: Vec<Complex<T>>,
    out: Vec<Complex<T>>,
    jump_buf: Vec<Complex<T>>,
}

impl<'a, T: Scalar> Engine<'a, T> {
    /// Integrate the conditional state over `duration` starting at absolute
    /// time `t_start`, handling any number of jumps on the way.
    fn advance(&mut self, duration: T, t_start: T) -> Result<()> {
        let n_sub = (duration / self.cfg.dt_max).to64().ceil().max(1.0) as usize;
        let h_step = duration / T::of(n_sub as f64);
        for i in 0..n_sub {
            let mut t = t_start + h_step * T::of(i as f64);
            let mut dt_left = h_step;
            // a substep may contain several jumps
            while dt_left > T::zero() {
                self.rk4_step(dt_left);
                let new_norm_sq = norm_sqr(&self.out);
                if !new_norm_sq.is_finite() {
                    return Err(Error::IntegratorStep {
                        t_us: t.to64(),
                        reason: "non-finite state norm".into(),
                    });
                }
                if new_norm_sq > self.norm_sq * (T::one() + T::of(64.0) * T::epsilon()) {
                    return Err(Error::IntegratorStep {
                        t_us: t.to64(),
                        reason: format!(
                            "norm grew between jumps ({} -> {})",
                            self.norm_sq.to64(),
                            new_norm_sq.to64()
                        ),
                    });
                }
                if new_norm_sq > self.threshold {
                    if new_norm_sq < self.cfg.norm_floor {
                        return Err(Error::IntegratorStep {
                            t_us: t.to64(),
                            reason: "norm underflow below norm_floor without jump bracket".into(),
                        });
                    }
                    std::mem::swap(&mut self.psi, &mut self.out);
                    self.norm_sq = new_norm_sq;
                    break;
                }
                // crossing inside (0, dt_left]: bisect from the pre-step state
                let tau = self.bisect_jump_time(dt_left);
                self.rk4_step(tau);
                std::mem::swap(&mut self.psi, &mut self.out);
                self.norm_sq = norm_sqr(&self.psi);
                let t_jump = t + tau;
                self.do_jump(t_jump)?;
                t = t_jump;
                dt_left = dt_left - tau;
            }
        }
        Ok(())
    }

    /// RK4 step of dpsi/dt = -i H_eff psi from `self.psi` into `self.out`.
    fn rk4_step(&mut self, dt: T) {
        let h = self.h_eff;
        apply_generator(h, &self.psi, &mut self.k1);
        axpy_into(&self.psi, &self.k1, dt * T::of(0.5), &mut self.stage);
        apply_generator(h, &self.stage, &mut self.k2);
        axpy_into(&self.psi, &self.k2, dt * T::of(0.5), &mut self.stage);
        apply_generator(h, &self.stage, &mut self.k3);
        axpy_into(&self.psi, &self.k3, dt, &mut self.stage);
        apply_generator(h, &self.stage, &mut self.k4);
        let sixth = dt / T::of(6.0);
        let third = dt / T::of(3.0);
        for i in 0..self.psi.len() {
            self.out[i] = self.psi[i]
                + self.k1[i].scale(sixth)
                + self.k2[i].scale(third)
                + self.k3[i].scale(third)
                + self.k4[i].scale(sixth);
        }
    }

    /// Find tau in (0, dt] with ||psi(tau)||^2 = threshold, to jump_time_tol.
    fn bisect_jump_time(&mut self, dt: T) -> T {
        let mut lo = T::zero();
        let mut hi = dt;
        let mut iterations = 0;
        while hi - lo > self.cfg.jump_time_tol && iterations < 200 {
            let mid = (lo + hi) * T::of(0.5);
            self.rk4_step(mid);
            if norm_sqr(&self.out) > self.threshold {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        ((lo + hi) * T::of(0.5)).max(self.cfg.jump_time_tol * T::of(0.5))
    }

    /// Select a channel by its weight, collapse, record the click, redraw the
    /// waiting-time threshold and apply a pending drive quench.
    fn do_jump(&mut self, t: T) -> Result<()> {
        let mut weights = Vec::with_capacity(self.jumps.len());
        let mut total = T::zero();
        for j in self.jumps {
            j.op.apply_slice(&self.psi, &mut self.jump_buf);
            let w = norm_sqr(&self.jump_buf);
            weights.push(w);
            total = total + w;
        }
        if !(total > T::zero()) {
            return Err(Error::InvalidJump);
        }
        let u = T::of(self.rng.gen::<f64>()) * total;
        let mut acc = T::zero();
        let mut selected = self.jumps.len() - 1;
        for (m, &w) in weights.iter().enumerate() {
            acc = acc + w;
            if u < acc {
                selected = m;
                break;
            }
        }
        if weights[selected] <= T::zero() {
            return Err(Error::InvalidJump);
        }

        self.jumps[selected]
            .op
            .apply_slice(&self.psi, &mut self.jump_buf);
        let norm = norm_sqr(&self.jump_buf).sqrt();
        let inv = norm.recip();
        for (p, b) in self.psi.iter_mut().zip(&self.jump_buf) {
            *p = b.scale(inv);
        }
        self.norm_sq = T::one();
        let channel = self.jumps[selected].channel;
        self.clicks.push(t, channel);
        self.threshold = draw_threshold::<T>(&mut self.rng);
        if channel == Channel::Cavity {
            if let Some(hq) = self.quench_pending.take() {
                self.h_eff = hq;
            }
        }
        Ok(())
    }
}

/// y = -i H x.
fn apply_generator<T: Scalar>(h: &SparseOperator<T>, x: &[Complex<T>], y: &mut [Complex<T>]) {
    for a in y.iter_mut() {
        *a = Complex::new(T::zero(), T::zero());
    }
    for &(r, c, v) in h.entries() {
        let t = v * x[c];
        y[r] = y[r] + Complex::new(t.im, -t.re);
    }
}

/// out = x + k * factor.
fn axpy_into<T: Scalar>(x: &[Complex<T>], k: &[Complex<T>], factor: T, out: &mut [Complex<T>]) {
    for i in 0..x.len() {
        out[i] = x[i] + k[i].scale(factor);
    }
}

fn norm_sqr<T: Scalar>(x: &[Complex<T>]) -> T {
    x.iter().map(|a| a.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{annihilation, BasisSpec};
    use crate::models::{
        build_ladder_hamiltonian, build_ladder_hamiltonian_parts, jump_operators, PhysicalParams,
    };
    use crate::units::mhz;

    fn basis() -> BasisSpec {
        BasisSpec::new(2, 3).unwrap()
    }

    #[test]
    fn jump_backaction_two_photon_state() {
        let b = basis();
        let p2: f64 = 0.01;
        let mut amps = vec![num_complex::Complex::new(0.0, 0.0); b.dimension()];
        amps[b.flat_index(0, 0).unwrap()] = num_complex::Complex::new(1.0, 0.0);
        amps[b.flat_index(0, 2).unwrap()] = num_complex::Complex::new(p2.sqrt(), 0.0);
        amps[b.flat_index(1, 1).unwrap()] = num_complex::Complex::new(p2.sqrt(), 0.0);
        let psi = StateVector::new(b, amps).unwrap().normalized().unwrap();
        let kappa: f64 = mhz(1.3);
        let c = annihilation::<f64>(b).scale(num_complex::Complex::new(kappa.sqrt(), 0.0));
        let after = apply_jump(&c, &psi).unwrap();
        // sqrt(2)|G,1> + |E,0> normalized: <n> = 2/3 exactly
        let n = crate::hilbert::number_operator::<f64>(b)
            .expectation(&after)
            .unwrap()
            .re;
        assert!((n - 2.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn jump_backaction_three_photon_state() {
        let b = basis();
        let eps: f64 = 0.03;
        let mut amps = vec![num_complex::Complex::new(0.0, 0.0); b.dimension()];
        amps[b.flat_index(0, 0).unwrap()] = num_complex::Complex::new(1.0, 0.0);
        amps[b.flat_index(0, 3).unwrap()] = num_complex::Complex::new(eps, 0.0);
        amps[b.flat_index(1, 2).unwrap()] = num_complex::Complex::new(-eps, 0.0);
        let psi = StateVector::new(b, amps).unwrap().normalized().unwrap();
        let c = annihilation::<f64>(b);
        let after = apply_jump(&c, &psi).unwrap();
        // sqrt(3)|G,2> - sqrt(2)|E,1> normalized: <n> = 8/5 exactly
        let n = crate::hilbert::number_operator::<f64>(b)
            .expectation(&after)
            .unwrap()
            .re;
        assert!((n - 8.0 / 5.0).abs() <= 1e-12);
    }

    #[test]
    fn jump_on_single_photon_gives_vacuum() {
        let b = basis();
        let psi = StateVector::basis_state(b, 0, 1).unwrap();
        let c = annihilation::<f64>(b);
        let after = apply_jump(&c, &psi).unwrap();
        let n = crate::hilbert::number_operator::<f64>(b)
            .expectation(&after)
            .unwrap()
            .re;
        assert_eq!(n, 0.0);
    }

    #[test]
    fn jump_with_zero_weight_errors() {
        let b = basis();
        let psi = StateVector::basis_state(b, 0, 0).unwrap();
        let c = annihilation::<f64>(b);
        assert!(matches!(apply_jump(&c, &psi), Err(Error::InvalidJump)));
    }

    #[test]
    fn unitary_limit_conserves_norm_and_energy() {
        let mut p = PhysicalParams::<f64>::default();
        p.n_max = 2;
        p.alpha = mhz(0.3);
        p.delta_probe = 5.0;
        let h = build_ladder_hamiltonian(&p).unwrap();
        let basis = p.basis().unwrap();
        // superposition with nonzero energy spread
        let mut amps = vec![num_complex::Complex::new(0.0, 0.0); basis.dimension()];
        amps[basis.flat_index(0, 0).unwrap()] = num_complex::Complex::new(0.8, 0.0);
        amps[basis.flat_index(0, 1).unwrap()] = num_complex::Complex::new(0.0, 0.5);
        amps[basis.flat_index(1, 0).unwrap()] = num_complex::Complex::new(-0.33, 0.1);
        let psi0 = StateVector::new(basis, amps).unwrap().normalized().unwrap();
        let e0 = h.expectation(&psi0).unwrap().re;

        let cfg = TrajectoryConfig::new(10.0, 1e-4, 0.5, 7).unwrap();
        let run = run_single(&h, None, &[], &psi0, &cfg, 0, &[cfg.sample_count() - 1]).unwrap();
        assert!(run.record.clicks.is_empty());
        // norm is conserved (the engine also guards against any growth, so a
        // final norm within tolerance bounds the whole history)
        assert!((run.final_norm_sq.sqrt() - 1.0).abs() <= 1e-8);
        // energy of the normalized state is conserved
        let rho = &run.densities[0];
        let h_dense = Matrix::from_sparse(&h);
        let e_final = h_dense.matmul(rho).trace().re;
        assert!(
            (e_final - e0).abs() <= 1e-8 * e0.abs().max(1.0),
            "energy drift {e0} -> {e_final}"
        );
    }

    #[test]
    fn pure_decay_emits_exactly_one_click() {
        let mut p = PhysicalParams::<f64>::default();
        p.n_max = 1;
        p.g0 = 0.0; // g_eff = 0
        p.gamma = 0.0;
        let h = build_ladder_hamiltonian(&p).unwrap();
        let jumps = jump_operators(&p).unwrap();
        let basis = p.basis().unwrap();
        let psi0 = StateVector::basis_state(basis, 0, 1).unwrap();
        let cfg = TrajectoryConfig::new(4.0, 1e-3, 0.5, 11).unwrap();
        for stream in 0..20 {
            let rec = run_single(&h, None, &jumps, &psi0, &cfg, stream, &[])
                .unwrap()
                .record;
            assert_eq!(rec.clicks.len(), 1, "stream {stream}");
            assert_eq!(rec.clicks.events()[0].1, Channel::Cavity);
        }
    }

    #[test]
    fn trajectory_is_deterministic() {
        let mut p = PhysicalParams::<f64>::default();
        p.n_max = 3;
        crate::models::Preset::Fig3
            .apply(&mut p, crate::models::Branch::Upper)
            .unwrap();
        let h = build_ladder_hamiltonian(&p).unwrap();
        let jumps = jump_operators(&p).unwrap();
        let psi0 = StateVector::ground(p.basis().unwrap());
        let cfg = TrajectoryConfig::new(5.0, 1e-3, 0.01, 42).unwrap();
        let a = run_trajectory(&h, &jumps, &psi0, &cfg).unwrap();
        let b = run_trajectory(&h, &jumps, &psi0, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quench_is_identity_when_drive_already_zero() {
        let mut p = PhysicalParams::<f64>::default();
        p.n_max = 2;
        p.alpha = 0.0;
        let (h_free, drive) = build_ladder_hamiltonian_parts(&p).unwrap();
        assert!(drive.entries().is_empty());
        let h = h_free.add(&drive).unwrap();
        let jumps = jump_operators(&p).unwrap();
        let basis = p.basis().unwrap();
        let psi0 = StateVector::basis_state(basis, 0, 1).unwrap();
        let cfg = TrajectoryConfig::new(2.0, 1e-3, 0.1, 3).unwrap();
        let plain = run_trajectory(&h, &jumps, &psi0, &cfg).unwrap();
        let quenched = run_trajectory_with_quench(&h, &h_free, &jumps, &psi0, &cfg).unwrap();
        assert_eq!(plain, quenched);
    }

    #[test]
    fn quenched_ground_state_stays_silent() {
        // After the quench the drive is gone; from the ground state no
        // further clicks can ever occur.
        let mut p = PhysicalParams::<f64>::default();
        p.n_max = 2;
        p.alpha = 0.0;
        let h = build_ladder_hamiltonian(&p).unwrap();
        let jumps = jump_operators(&p).unwrap();
        let psi0 = StateVector::ground(p.basis().unwrap());
        let cfg = TrajectoryConfig::new(10.0, 1e-3, 1.0, 5).unwrap();
        let rec = run_trajectory(&h, &jumps, &psi0, &cfg).unwrap();
        assert!(rec.clicks.is_empty());
        assert!(rec.mean_photon.iter().all(|&n| n == 0.0));
    }

    #[test]
    fn rejects_non_hermitian_hamiltonian() {
        let b = basis();
        let h = annihilation::<f64>(b); // not Hermitian
        let psi0 = StateVector::ground(b);
        let cfg = TrajectoryConfig::new(1.0, 1e-3, 0.1, 1).unwrap();
        assert!(run_trajectory(&h, &[], &psi0, &cfg).is_err());
    }

    #[test]
    fn config_invariants_enforced() {
        assert!(TrajectoryConfig::<f64>::new(1.0, 0.0, 0.1, 0).is_err());
        assert!(TrajectoryConfig::<f64>::new(1.0, 0.2, 0.1, 0).is_err());
        assert!(TrajectoryConfig::<f64>::new(0.05, 1e-3, 0.1, 0).is_err());
        let mut cfg = TrajectoryConfig::<f64>::new(1.0, 1e-3, 0.1, 0).unwrap();
        cfg.jump_time_tol = 1e-3; // > dt_max/10
        assert!(cfg.validate().is_err());
    }
}
