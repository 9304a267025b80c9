//! Spectroscopy of the undriven system: dressed ladders, multi-photon
//! resonance locations, perturbative line strengths and the combinatorial
//! blockade detuning.
//!
//! All frequencies are reported as probe detunings in the rotating frame; the
//! bare cavity frequency drops out everywhere.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::models::{build_ladder_hamiltonian, effective_coupling, PhysicalParams};
use crate::scalar::Scalar;

/// One dressed level |n, +-> of the two-level (single-bubble) ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedLevel<T: Scalar> {
    /// Total excitation number of the block.
    pub n: usize,
    /// +1 for the upper branch, -1 for the lower.
    pub branch: i8,
    /// Energy offset from the n-excitation degeneracy point, +- g_eff sqrt(n).
    pub frequency_offset: T,
}

/// Dressed-state offsets (+g_eff sqrt(n), -g_eff sqrt(n)) of the n-excitation
/// block for the single-bubble model. n = 0 returns (0, 0) for the ground
/// state by convention.
pub fn dressed_frequencies<T: Scalar>(n: usize, p: &PhysicalParams<T>) -> Result<(T, T)> {
    if p.n_bubbles != 1 {
        return Err(Error::parameter(
            "n_bubbles",
            "dressed_frequencies applies to the single-bubble model; use ladder_spectrum",
        ));
    }
    if n == 0 {
        return Ok((T::zero(), T::zero()));
    }
    let g_eff = effective_coupling(p)?;
    let offset = g_eff * T::of(n as f64).sqrt();
    Ok((offset, -offset))
}

/// Both dressed levels of the n-excitation block.
pub fn dressed_levels<T: Scalar>(n: usize, p: &PhysicalParams<T>) -> Result<[DressedLevel<T>; 2]> {
    let (plus, minus) = dressed_frequencies(n, p)?;
    Ok([
        DressedLevel {
            n,
            branch: 1,
            frequency_offset: plus,
        },
        DressedLevel {
            n,
            branch: -1,
            frequency_offset: minus,
        },
    ])
}

/// Probe detunings of the n-photon resonance, +- g_eff / sqrt(n): an n-photon
/// probe reaches |n, +-> when each photon carries 1/n of the dressed offset.
pub fn n_photon_resonance<T: Scalar>(n: usize, p: &PhysicalParams<T>) -> Result<(T, T)> {
    if n == 0 {
        return Err(Error::parameter("n", "photon order must be >= 1"));
    }
    let g_eff = effective_coupling(p)?;
    let detuning = g_eff / T::of(n as f64).sqrt();
    Ok((detuning, -detuning))
}

/// Perturbative excitation strengths and occupation estimates for the one-
/// and two-photon resonances, evaluated on resonance (delta = 0 relative to
/// the respective dressed line).
///
/// beta1 = alpha / sqrt(2), p1 = |beta1|^2 / (kappa^2/4), <n>_1 = p1 / 2;
/// beta2 = 3 alpha^2 / g_eff, p2 = |beta2|^2 / kappa'^2 with kappa' = 3
/// kappa / 2, <n>_2 = (3/2) p2. These are order-of-magnitude estimates; the
/// exact numbers come from the steady-state solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeStrengths<T: Scalar> {
    pub beta1: T,
    pub p1: T,
    pub n_avg1: T,
    pub beta2: T,
    pub p2: T,
    pub n_avg2: T,
}

pub fn perturbative_strengths<T: Scalar>(
    p: &PhysicalParams<T>,
) -> Result<PerturbativeStrengths<T>> {
    let g_eff = effective_coupling(p)?;
    if !(g_eff > T::zero()) {
        return Err(Error::parameter(
            "g0",
            "perturbative estimates need g_eff > 0",
        ));
    }
    let half = T::of(0.5);
    let beta1 = p.alpha / T::of(2.0).sqrt();
    let p1 = beta1 * beta1 / (p.kappa * p.kappa * T::of(0.25));
    let n_avg1 = half * p1;
    let beta2 = T::of(3.0) * p.alpha * p.alpha / g_eff;
    let kappa_prime = T::of(1.5) * p.kappa;
    let p2 = beta2 * beta2 / (kappa_prime * kappa_prime);
    let n_avg2 = T::of(1.5) * p2;
    Ok(PerturbativeStrengths {
        beta1,
        p1,
        n_avg1,
        beta2,
        p2,
        n_avg2,
    })
}

/// Flat indices of the n_exc-excitation block (k + n = n_exc) of the ladder
/// basis.
pub fn excitation_block_indices<T: Scalar>(
    p: &PhysicalParams<T>,
    n_exc: usize,
) -> Result<Vec<usize>> {
    let basis = p.basis()?;
    if n_exc > p.n_max {
        return Err(Error::IndexOutOfRange {
            what: "excitation number",
            got: n_exc,
            limit: p.n_max + 1,
        });
    }
    let mut idx = Vec::new();
    for k in 0..=n_exc.min(p.n_bubbles) {
        let n = n_exc - k;
        if n <= p.n_max {
            idx.push(basis.flat_index(k, n)?);
        }
    }
    Ok(idx)
}

/// Exact eigenvalues (ascending) of the n_exc-excitation block of the
/// undriven ladder Hamiltonian at zero probe detuning. The drive and the
/// detuning of `p` are ignored; they would break the block structure.
pub fn ladder_spectrum<T: Scalar>(p: &PhysicalParams<T>, n_exc: usize) -> Result<Vec<T>> {
    let mut undriven = p.clone();
    undriven.alpha = T::zero();
    undriven.delta_probe = T::zero();
    let h = build_ladder_hamiltonian(&undriven)?;
    let idx = excitation_block_indices(&undriven, n_exc)?;
    Matrix::from_sparse_submatrix(&h, &idx).eigvalsh()
}

/// Detuning of a probe sitting on the first dressed line from the
/// two-excitation resonance of the bubble ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockadeDetuning<T: Scalar> {
    /// 2 (1 - sqrt(1 - 1/(2 n_b))) g_eff.
    pub exact: T,
    /// Large-n_b asymptote g_eff / (2 n_b).
    pub asymptotic: T,
}

/// Combinatorial blockade detuning: with the probe on the single-excitation
/// dressed line, the two-photon transition to the two-excitation manifold is
/// off resonance by `exact`, which approaches g_eff/(2 n_b) for many bubbles.
pub fn blockade_detuning<T: Scalar>(p: &PhysicalParams<T>) -> Result<BlockadeDetuning<T>> {
    if p.n_bubbles < 1 {
        return Err(Error::parameter("n_bubbles", "must be >= 1"));
    }
    let g_eff = effective_coupling(p)?;
    let nb = T::of(p.n_bubbles as f64);
    let exact = T::of(2.0) * (T::one() - (T::one() - (T::of(2.0) * nb).recip()).sqrt()) * g_eff;
    let asymptotic = g_eff / (T::of(2.0) * nb);
    Ok(BlockadeDetuning { exact, asymptotic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{mhz, to_mhz};

    fn defaults() -> PhysicalParams<f64> {
        PhysicalParams::default()
    }

    #[test]
    fn dressed_frequencies_reference_values() {
        let p = defaults();
        let g_eff = effective_coupling(&p).unwrap();

        let (plus, minus) = dressed_frequencies(1, &p).unwrap();
        assert_eq!(plus, g_eff);
        assert_eq!(minus, -g_eff);
        assert!((to_mhz(plus) - 10.54).abs() < 5e-3);

        let (plus2, _) = dressed_frequencies(2, &p).unwrap();
        assert!((plus2 - 2f64.sqrt() * g_eff).abs() < 1e-12);

        assert_eq!(dressed_frequencies(0, &p).unwrap(), (0.0, 0.0));

        let levels = dressed_levels(3, &p).unwrap();
        assert_eq!(levels[0].branch, 1);
        assert!((levels[1].frequency_offset + 3f64.sqrt() * g_eff).abs() < 1e-12);
    }

    #[test]
    fn dressed_frequencies_redirects_for_multi_bubble() {
        let mut p = defaults();
        p.n_bubbles = 3;
        assert!(dressed_frequencies(1, &p).is_err());
    }

    #[test]
    fn resonance_positions() {
        let p = defaults();
        let g_eff = effective_coupling(&p).unwrap();
        let (r1, r1m) = n_photon_resonance(1, &p).unwrap();
        assert_eq!(r1, g_eff);
        assert_eq!(r1m, -g_eff);
        let (r2, _) = n_photon_resonance(2, &p).unwrap();
        assert!((r2 - g_eff / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn resonances_are_separated_by_more_than_a_linewidth() {
        let p = defaults();
        let (r2, _) = n_photon_resonance(2, &p).unwrap();
        let (r3, _) = n_photon_resonance(3, &p).unwrap();
        let (r4, _) = n_photon_resonance(4, &p).unwrap();
        let sep23 = (r2 - r3).abs();
        let sep34 = (r3 - r4).abs();
        assert!((to_mhz(sep23) - 1.37).abs() < 0.005);
        assert!((to_mhz(sep34) - 0.82).abs() < 0.01);
        // each dressed transmission line has full width ~kappa/2
        let linewidth = p.kappa / 2.0;
        assert!(sep23 >= linewidth);
        assert!(sep34 >= linewidth);
    }

    #[test]
    fn perturbative_strengths_reference_values() {
        let mut p = defaults();
        p.alpha = mhz(0.15);
        let s = perturbative_strengths(&p).unwrap();
        assert!((to_mhz(s.beta1) - 0.106).abs() < 5e-4);
        assert!((s.p1 - s.beta1 * s.beta1 / (p.kappa * p.kappa / 4.0)).abs() < 1e-15);
        assert!((s.n_avg1 - 0.5 * s.p1).abs() < 1e-15);

        p.alpha = mhz(1.5);
        let s = perturbative_strengths(&p).unwrap();
        let g_eff = effective_coupling(&p).unwrap();
        assert!((s.beta2 - 3.0 * p.alpha * p.alpha / g_eff).abs() < 1e-12);
        assert!((to_mhz(s.beta2) - 0.640).abs() < 5e-4);
        assert!((s.n_avg2 - 1.5 * s.p2).abs() < 1e-15);

        p.alpha = 0.0;
        let s = perturbative_strengths(&p).unwrap();
        assert_eq!(s.beta1, 0.0);
        assert_eq!(s.p1, 0.0);
        assert_eq!(s.beta2, 0.0);
        assert_eq!(s.p2, 0.0);
    }

    #[test]
    fn ladder_spectrum_two_bubbles_two_excitations() {
        let mut p = defaults();
        p.n_bubbles = 2;
        p.n_max = 4;
        let g_eff = effective_coupling(&p).unwrap();
        let vals = ladder_spectrum(&p, 2).unwrap();
        let split = 3f64.sqrt() * g_eff;
        assert_eq!(vals.len(), 3);
        assert!((vals[0] + split).abs() < 1e-10 * split);
        assert!(vals[1].abs() < 1e-10 * split);
        assert!((vals[2] - split).abs() < 1e-10 * split);
    }

    #[test]
    fn ladder_spectrum_single_bubble_single_excitation() {
        let p = defaults();
        let g_eff = effective_coupling(&p).unwrap();
        let vals = ladder_spectrum(&p, 1).unwrap();
        assert_eq!(vals.len(), 2);
        assert!((vals[0] + g_eff).abs() < 1e-10 * g_eff);
        assert!((vals[1] - g_eff).abs() < 1e-10 * g_eff);
    }

    #[test]
    fn ladder_spectrum_matches_projector_restricted_dense_diagonalization() {
        let mut p = defaults();
        p.n_bubbles = 3;
        p.n_max = 4;
        p.alpha = 0.0;
        p.delta_probe = 0.0;
        let n_exc = 2;

        // independent route: full dense Hamiltonian conjugated with the block
        // projector, then diagonalized; block eigenvalues are the nonzero-
        // projected sector
        let h = build_ladder_hamiltonian(&p).unwrap();
        let dense = Matrix::from_sparse(&h);
        let idx = excitation_block_indices(&p, n_exc).unwrap();
        let dim = dense.dim();
        let mut projected = Matrix::<f64>::zeros(dim);
        for &r in &idx {
            for &c in &idx {
                projected[(r, c)] = dense[(r, c)];
            }
        }
        let mut all = projected.eigvalsh().unwrap();
        // drop the dim - block_size zeros contributed by the complement of
        // the projector (the block's own zero eigenvalue is interchangeable
        // with them)
        all.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
        let mut kept: Vec<f64> = all[(dim - idx.len())..].to_vec();
        let mut expected = ladder_spectrum(&p, n_exc).unwrap();
        kept.sort_by(|a, b| a.partial_cmp(b).unwrap());
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let scale = expected.last().unwrap().abs();
        for (a, b) in kept.iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
        }

        // closed form for the two-excitation block: 0, +-sqrt(2 g1^2 + g2^2)
        let g = crate::models::ladder_couplings(&p).unwrap();
        let split = (2.0 * g[0] * g[0] + g[1] * g[1]).sqrt();
        assert!((expected[0] + split).abs() < 1e-10 * split);
        assert!((expected[2] - split).abs() < 1e-10 * split);
    }

    #[test]
    fn ladder_spectrum_rejects_excitation_beyond_cutoff() {
        let mut p = defaults();
        p.n_max = 3;
        assert!(ladder_spectrum(&p, 4).is_err());
    }

    #[test]
    fn single_bubble_spectrum_matches_dressed_frequencies() {
        let mut p = defaults();
        p.n_max = 5;
        for n in 1..=p.n_max {
            let vals = ladder_spectrum(&p, n).unwrap();
            let (plus, minus) = dressed_frequencies(n, &p).unwrap();
            assert!((vals[0] - minus).abs() <= 1e-10 * plus);
            assert!((vals[1] - plus).abs() <= 1e-10 * plus);
        }
    }

    #[test]
    fn block_spectra_are_symmetric_about_zero() {
        for n_b in [1usize, 2, 4] {
            let mut p = defaults();
            p.n_bubbles = n_b;
            p.n_max = 4;
            for n_exc in 1..=3 {
                let vals = ladder_spectrum(&p, n_exc).unwrap();
                let scale = vals.iter().fold(0f64, |a, v| a.max(v.abs())).max(1e-300);
                for (lo, hi) in vals.iter().zip(vals.iter().rev()) {
                    assert!((lo + hi).abs() <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn two_excitation_eigenvalues_closed_form_all_bubbles() {
        for n_b in [1usize, 2, 3, 5, 10] {
            let mut p = defaults();
            p.n_bubbles = n_b;
            p.n_max = 4;
            let g_eff = effective_coupling(&p).unwrap();
            let split = (4.0 - 2.0 / n_b as f64).sqrt() * g_eff;
            let vals = ladder_spectrum(&p, 2).unwrap();
            if n_b == 1 {
                // the |E_2> state does not exist; only the +- pair remains
                assert_eq!(vals.len(), 2);
                assert!((vals[0] + split).abs() < 1e-10 * split);
                assert!((vals[1] - split).abs() < 1e-10 * split);
            } else {
                assert_eq!(vals.len(), 3);
                assert!((vals[0] + split).abs() < 1e-10 * split);
                assert!(vals[1].abs() < 1e-10 * split);
                assert!((vals[2] - split).abs() < 1e-10 * split);
            }
        }
    }

    #[test]
    fn blockade_detuning_values() {
        let p = defaults();
        let g_eff = effective_coupling(&p).unwrap();
        let b = blockade_detuning(&p).unwrap();
        // n_b = 1: 2 (1 - sqrt(1/2)) g_eff
        assert!((b.exact - 2.0 * (1.0 - 0.5f64.sqrt()) * g_eff).abs() < 1e-12);
        assert!((b.exact / g_eff - 0.5858).abs() < 1e-4);

        let mut p5 = defaults();
        p5.n_bubbles = 5;
        let b5 = blockade_detuning(&p5).unwrap();
        assert!((b5.exact / g_eff - 0.10263).abs() < 5e-5);
        assert!((b5.asymptotic / g_eff - 0.1).abs() < 1e-12);

        let mut p_inf = defaults();
        p_inf.n_bubbles = 1_000_000_000;
        let b_inf = blockade_detuning(&p_inf).unwrap();
        assert!(b_inf.exact / g_eff < 1e-8);
    }
}
