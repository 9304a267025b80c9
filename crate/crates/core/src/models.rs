//! Hamiltonians and jump operators of the ensemble-cavity system.
//!
//! The working model is the excitation ladder |E_0>..|E_nb> of a blockaded
//! ensemble coupled to one cavity mode, driven through a mirror by a
//! monochromatic probe. All Hamiltonians are built in the frame rotating at
//! the probe frequency, so they are time independent and carry the probe
//! detuning `delta_probe` on every excitation quantum. Coupling phases are
//! taken real and non-negative (a global phase is gauge-removable).
//!
//! The module also builds the full three-level collective model (ground,
//! intermediate, Rydberg) on the permutation-symmetric subspace of a few
//! atoms; it serves as the exact oracle for the adiabatic elimination of the
//! intermediate state.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation, ladder_lowering, ladder_raising, BasisSpec, Channel, JumpOperator, SparseOperator,
};
use crate::scalar::Scalar;
use crate::units::mhz;

/// Physical parameters of the ensemble-cavity system. All frequencies and
/// rates are angular, in rad/us.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams<T: Scalar> {
    /// Atom count N.
    pub n_atoms: u64,
    /// Single-atom cavity coupling on the ground-intermediate transition.
    pub g0: T,
    /// Classical Rabi frequency on the intermediate-Rydberg transition.
    pub omega: T,
    /// Detuning of cavity and laser from the intermediate state.
    pub delta: T,
    /// Cavity energy decay rate.
    pub kappa: T,
    /// Rydberg-state decay rate.
    pub gamma: T,
    /// Probe drive amplitude.
    pub alpha: T,
    /// Probe detuning from the bare cavity resonance.
    pub delta_probe: T,
    /// Number of blockade bubbles the ensemble decomposes into.
    pub n_bubbles: usize,
    /// Photon cutoff n_max of the Fock factor.
    pub n_max: usize,
}

impl<T: Scalar> Default for PhysicalParams<T> {
    fn default() -> Self {
        // Reference operating point: a 1000-atom ensemble coupled to the 70s
        // Rydberg state, undriven.
        Self {
            n_atoms: 1000,
            g0: mhz(10.0),
            omega: mhz(30.0),
            delta: mhz(900.0),
            kappa: mhz(1.3),
            gamma: mhz(0.55e-3),
            alpha: T::zero(),
            delta_probe: T::zero(),
            n_bubbles: 1,
            n_max: 6,
        }
    }
}

impl<T: Scalar> PhysicalParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_atoms < 1 {
            return Err(Error::parameter("n_atoms", "must be >= 1"));
        }
        if self.n_bubbles < 1 {
            return Err(Error::parameter("n_bubbles", "must be >= 1"));
        }
        if self.delta == T::zero() {
            return Err(Error::parameter("delta", "must be nonzero"));
        }
        if !(self.kappa > T::zero()) {
            return Err(Error::parameter("kappa", "must be > 0"));
        }
        if self.gamma < T::zero() {
            return Err(Error::parameter("gamma", "must be >= 0"));
        }
        if self.n_max < 1 {
            return Err(Error::parameter("n_max", "must be >= 1"));
        }
        Ok(())
    }

    /// Basis the ladder model lives on: n_bubbles + 1 ladder levels times the
    /// Fock factor.
    pub fn basis(&self) -> Result<BasisSpec> {
        self.validate()?;
        BasisSpec::new(self.n_bubbles + 1, self.n_max)
    }
}

/// Collectively enhanced two-photon coupling sqrt(N) g0 Omega / Delta.
pub fn effective_coupling<T: Scalar>(p: &PhysicalParams<T>) -> Result<T> {
    if p.delta == T::zero() {
        return Err(Error::parameter("delta", "must be nonzero"));
    }
    Ok(T::of(p.n_atoms as f64).sqrt() * p.g0 * p.omega / p.delta)
}

/// Ladder couplings g_k = sqrt((n_b - k + 1) k) sqrt(N / n_b) g0 Omega /
/// Delta for k = 1..=n_b. The angular-momentum matrix elements make the array
/// mirror symmetric, g_k = g_{n_b + 1 - k}.
pub fn ladder_couplings<T: Scalar>(p: &PhysicalParams<T>) -> Result<Vec<T>> {
    if p.delta == T::zero() {
        return Err(Error::parameter("delta", "must be nonzero"));
    }
    if p.n_bubbles < 1 {
        return Err(Error::parameter("n_bubbles", "must be >= 1"));
    }
    let nb = p.n_bubbles as f64;
    let per_bubble = T::of(p.n_atoms as f64 / nb).sqrt() * p.g0 * p.omega / p.delta;
    Ok((1..=p.n_bubbles)
        .map(|k| {
            let k = k as f64;
            T::of((nb - k + 1.0) * k).sqrt() * per_bubble
        })
        .collect())
}

/// Ladder Hamiltonian in the probe rotating frame:
///
/// H = -delta (a^dag a + sum_k k |E_k><E_k|)
///     + [a (sum_k g_k |E_k><E_{k-1}|) + h.c.]
///     + alpha (a + a^dag)
///
/// with delta = `delta_probe`. For n_bubbles = 1 this is exactly the driven
/// Jaynes-Cummings model of the blockaded super atom.
pub fn build_ladder_hamiltonian<T: Scalar>(p: &PhysicalParams<T>) -> Result<SparseOperator<T>> {
    let (free, drive) = build_ladder_hamiltonian_parts(p)?;
    free.add(&drive)
}

/// Same Hamiltonian split into the undriven part and the probe drive term
/// alpha (a + a^dag); the trajectory engine uses the split to quench the
/// drive mid-run.
pub fn build_ladder_hamiltonian_parts<T: Scalar>(
    p: &PhysicalParams<T>,
) -> Result<(SparseOperator<T>, SparseOperator<T>)> {
    build_ladder_hamiltonian_with_diagonal(p, None)
}

/// Variant with an optional real diagonal correction (indexed by flat basis
/// index), the hook for dispersive-shift corrections. Defaults to zero and is
/// not used by any preset.
pub fn build_ladder_hamiltonian_with_diagonal<T: Scalar>(
    p: &PhysicalParams<T>,
    diagonal_correction: Option<&[T]>,
) -> Result<(SparseOperator<T>, SparseOperator<T>)> {
    let basis = p.basis()?;
    let dim = basis.dimension();
    let couplings = ladder_couplings(p)?;

    let mut entries = Vec::new();
    for k in 0..basis.ladder_levels() {
        for n in 0..=basis.photon_cutoff() {
            let idx = basis.flat_index(k, n)?;
            let mut diag = -p.delta_probe * T::of((k + n) as f64);
            if let Some(corr) = diagonal_correction {
                if corr.len() != dim {
                    return Err(Error::DimensionMismatch {
                        left: corr.len(),
                        right: dim,
                    });
                }
                diag = diag + corr[idx];
            }
            if diag != T::zero() {
                entries.push((idx, idx, Complex::new(diag, T::zero())));
            }
        }
    }
    // a (x) sum_k g_k |E_k><E_{k-1}| + h.c.
    for (km1, &g) in couplings.iter().enumerate() {
        for n in 1..=basis.photon_cutoff() {
            let from = basis.flat_index(km1, n)?;
            let to = basis.flat_index(km1 + 1, n - 1)?;
            let v = Complex::new(g * T::of(n as f64).sqrt(), T::zero());
            entries.push((to, from, v));
            entries.push((from, to, v));
        }
    }
    let free = SparseOperator::from_entries(dim, entries)?;

    let mut drive_entries = Vec::new();
    if p.alpha != T::zero() {
        for k in 0..basis.ladder_levels() {
            for n in 1..=basis.photon_cutoff() {
                let hi = basis.flat_index(k, n)?;
                let lo = basis.flat_index(k, n - 1)?;
                let v = Complex::new(p.alpha * T::of(n as f64).sqrt(), T::zero());
                drive_entries.push((lo, hi, v));
                drive_entries.push((hi, lo, v));
            }
        }
    }
    let drive = SparseOperator::from_entries(dim, drive_entries)?;
    Ok((free, drive))
}

/// Collapse operators: C_cav = sqrt(kappa) a on the cavity channel and
/// C_ryd = sqrt(gamma) L on the Rydberg channel, with L the symmetric
/// collective de-excitation (matrix element sqrt(k)).
pub fn jump_operators<T: Scalar>(p: &PhysicalParams<T>) -> Result<Vec<JumpOperator<T>>> {
    let basis = p.basis()?;
    let cav = annihilation::<T>(basis).scale(Complex::new(p.kappa.sqrt(), T::zero()));
    let ryd = ladder_lowering::<T>(basis).scale(Complex::new(p.gamma.sqrt(), T::zero()));
    Ok(vec![
        JumpOperator {
            op: cav,
            channel: Channel::Cavity,
        },
        JumpOperator {
            op: ryd,
            channel: Channel::Rydberg,
        },
    ])
}

/// Raising part of the ladder coupling, sum_k g_k |E_k><E_{k-1}| (x) 1, with
/// the couplings of `p`.
pub fn collective_raising<T: Scalar>(p: &PhysicalParams<T>) -> Result<SparseOperator<T>> {
    let basis = p.basis()?;
    ladder_raising(&ladder_couplings(p)?, basis)
}

/// Named drive presets: probe amplitude and detuning for the four standard
/// detection-record experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// One-photon resonance, alpha = 2 pi x 0.15 MHz, delta = +g_eff.
    Fig3,
    /// Two-photon resonance, alpha = 2 pi x 1.5 MHz, delta = +g_eff/sqrt(2).
    Fig4,
    /// Three-photon resonance, alpha = 2 pi x 1.25 MHz, delta = +g_eff/sqrt(3).
    Fig5,
    /// Three-photon resonance, stronger drive, alpha = 2 pi x 2 MHz,
    /// delta = +g_eff/sqrt(3).
    Fig6,
}

/// Which dressed branch the preset detuning addresses. The model is symmetric
/// under delta -> -delta; the upper branch is the documented default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Upper,
    Lower,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig3, Preset::Fig4, Preset::Fig5, Preset::Fig6];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.iter().copied().find(|p| p.name() == name)
    }

    /// Probe amplitude in MHz (plain frequency).
    pub fn alpha_mhz(&self) -> f64 {
        match self {
            Preset::Fig3 => 0.15,
            Preset::Fig4 => 1.5,
            Preset::Fig5 => 1.25,
            Preset::Fig6 => 2.0,
        }
    }

    /// Probe detuning as a multiple of g_eff.
    pub fn detuning_in_geff(&self) -> f64 {
        match self {
            Preset::Fig3 => 1.0,
            Preset::Fig4 => 1.0 / 2f64.sqrt(),
            Preset::Fig5 => 1.0 / 3f64.sqrt(),
            Preset::Fig6 => 1.0 / 3f64.sqrt(),
        }
    }

    /// Overwrite alpha and delta_probe of `params` with the preset drive.
    pub fn apply<T: Scalar>(&self, params: &mut PhysicalParams<T>, branch: Branch) -> Result<()> {
        let g_eff = effective_coupling(params)?;
        let sign = match branch {
            Branch::Upper => T::one(),
            Branch::Lower => -T::one(),
        };
        params.alpha = mhz(self.alpha_mhz());
        params.delta_probe = sign * T::of(self.detuning_in_geff()) * g_eff;
        Ok(())
    }
}

/// Symmetric-subspace basis of the full three-level model: collective states
/// |n_g, n_i, n_e> with n_g + n_i + n_e = N, n_e <= max_rydberg, times the
/// photon Fock factor.
#[derive(Debug, Clone)]
pub struct ThreeLevelBasisSpec {
    n_small: usize,
    max_rydberg: usize,
    photon_cutoff: usize,
    /// Atomic occupation triples, in enumeration order.
    atomic_states: Vec<(usize, usize, usize)>,
}

/// Largest product dimension the oracle basis may reach.
pub const THREE_LEVEL_DIM_CAP: usize = 4096;

impl ThreeLevelBasisSpec {
    pub fn new(n_small: usize, max_rydberg: usize, photon_cutoff: usize) -> Result<Self> {
        if n_small < 1 || n_small > 6 {
            return Err(Error::parameter(
                "n_small",
                "oracle model supports 1..=6 atoms",
            ));
        }
        if photon_cutoff < 1 {
            return Err(Error::parameter("photon_cutoff", "must be >= 1"));
        }
        let mut atomic_states = Vec::new();
        for n_e in 0..=max_rydberg.min(n_small) {
            for n_i in 0..=(n_small - n_e) {
                let n_g = n_small - n_e - n_i;
                atomic_states.push((n_g, n_i, n_e));
            }
        }
        let spec = Self {
            n_small,
            max_rydberg,
            photon_cutoff,
            atomic_states,
        };
        if spec.dimension() > THREE_LEVEL_DIM_CAP {
            return Err(Error::CapExceeded {
                what: "three-level oracle basis",
                dim: spec.dimension(),
                cap: THREE_LEVEL_DIM_CAP,
            });
        }
        Ok(spec)
    }

    pub fn n_small(&self) -> usize {
        self.n_small
    }

    pub fn max_rydberg(&self) -> usize {
        self.max_rydberg
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    pub fn atomic_states(&self) -> &[(usize, usize, usize)] {
        &self.atomic_states
    }

    pub fn dimension(&self) -> usize {
        self.atomic_states.len() * (self.photon_cutoff + 1)
    }

    /// Flat index of |n_g, n_i, n_e> (x) |n photons>.
    pub fn index_of(&self, atomic: (usize, usize, usize), n: usize) -> Option<usize> {
        if n > self.photon_cutoff {
            return None;
        }
        self.atomic_states
            .iter()
            .position(|&s| s == atomic)
            .map(|a| a * (self.photon_cutoff + 1) + n)
    }

    pub fn state_at(&self, index: usize) -> ((usize, usize, usize), usize) {
        let per = self.photon_cutoff + 1;
        (self.atomic_states[index / per], index % per)
    }
}

/// Full three-level collective Hamiltonian on the symmetric subspace, in the
/// probe rotating frame:
///
/// H = -Delta sum_j |i_j><i_j| - delta_probe (a^dag a + n_i + n_e)
///     + [g0 a^dag S_gi + h.c.] + [Omega S_ei + h.c.]
///     + alpha (a + a^dag) + U_shift P(n_e >= 2)
///
/// where S_gi lowers an intermediate excitation back to the ground state and
/// S_ei promotes it to the Rydberg state, with the bosonic symmetric-subspace
/// matrix elements. `u_shift` mimics the interaction shift that spectrally
/// separates multiply Rydberg-excited states.
pub fn build_three_level_full<T: Scalar>(
    spec: &ThreeLevelBasisSpec,
    p: &PhysicalParams<T>,
    u_shift: T,
) -> Result<SparseOperator<T>> {
    let dim = spec.dimension();
    let cutoff = spec.photon_cutoff;
    let mut entries = Vec::new();

    for (a_idx, &(n_g, n_i, n_e)) in spec.atomic_states.iter().enumerate() {
        for n in 0..=cutoff {
            let idx = a_idx * (cutoff + 1) + n;
            let mut diag =
                -p.delta * T::of(n_i as f64) - p.delta_probe * T::of((n + n_i + n_e) as f64);
            if n_e >= 2 {
                diag = diag + u_shift;
            }
            if diag != T::zero() {
                entries.push((idx, idx, Complex::new(diag, T::zero())));
            }

            // g0 a^dag S_gi: |n_g, n_i, n_e; n> -> |n_g+1, n_i-1, n_e; n+1>
            if n_i >= 1 && n < cutoff {
                if let Some(to) = spec.index_of((n_g + 1, n_i - 1, n_e), n + 1) {
                    let me = p.g0
                        * T::of(((n_g + 1) * n_i) as f64).sqrt()
                        * T::of((n + 1) as f64).sqrt();
                    let v = Complex::new(me, T::zero());
                    entries.push((to, idx, v));
                    entries.push((idx, to, v));
                }
            }

            // Omega S_ei: |n_g, n_i, n_e; n> -> |n_g, n_i-1, n_e+1; n>
            if n_i >= 1 {
                if let Some(to) = spec.index_of((n_g, n_i - 1, n_e + 1), n) {
                    let me = p.omega * T::of((n_i * (n_e + 1)) as f64).sqrt();
                    let v = Complex::new(me, T::zero());
                    entries.push((to, idx, v));
                    entries.push((idx, to, v));
                }
            }

            // alpha (a + a^dag)
            if p.alpha != T::zero() && n < cutoff {
                let to = idx + 1;
                let v = Complex::new(p.alpha * T::of((n + 1) as f64).sqrt(), T::zero());
                entries.push((to, idx, v));
                entries.push((idx, to, v));
            }
        }
    }
    SparseOperator::from_entries(dim, entries)
}
