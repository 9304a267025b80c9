//! Basis indexing, state vectors and sparse operator algebra on the truncated
//! product space (atomic excitation ladder) x (photon Fock space).
//!
//! Basis layout: the state with ladder level `k` and photon number `n` sits at
//! flat index `k * (n_max + 1) + n`. All types are immutable after
//! construction and safe to share across trajectory workers.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Truncated product basis |E_k, n> with `ladder_levels` atomic states
/// (k = 0..n_b) and Fock states n = 0..=n_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    ladder_levels: usize,
    photon_cutoff: usize,
}

impl BasisSpec {
    pub fn new(ladder_levels: usize, photon_cutoff: usize) -> Result<Self> {
        if ladder_levels < 2 {
            return Err(Error::parameter("ladder_levels", "must be >= 2"));
        }
        if photon_cutoff < 1 {
            return Err(Error::parameter("photon_cutoff", "must be >= 1"));
        }
        Ok(Self {
            ladder_levels,
            photon_cutoff,
        })
    }

    pub fn ladder_levels(&self) -> usize {
        self.ladder_levels
    }

    /// Largest retained photon number n_max.
    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    pub fn dimension(&self) -> usize {
        self.ladder_levels * (self.photon_cutoff + 1)
    }

    /// Flat index of |E_k, n>, laid out as `k * (n_max + 1) + n`.
    pub fn flat_index(&self, k: usize, n: usize) -> Result<usize> {
        if k >= self.ladder_levels {
            return Err(Error::IndexOutOfRange {
                what: "ladder level k",
                got: k,
                limit: self.ladder_levels,
            });
        }
        if n > self.photon_cutoff {
            return Err(Error::IndexOutOfRange {
                what: "photon number n",
                got: n,
                limit: self.photon_cutoff + 1,
            });
        }
        Ok(k * (self.photon_cutoff + 1) + n)
    }

    /// Inverse of [`Self::flat_index`].
    pub fn unflatten(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.dimension() {
            return Err(Error::IndexOutOfRange {
                what: "flat index",
                got: index,
                limit: self.dimension(),
            });
        }
        Ok((
            index / (self.photon_cutoff + 1),
            index % (self.photon_cutoff + 1),
        ))
    }
}

/// Detector channel a jump operator reports clicks on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Cavity,
    Rydberg,
}

impl Channel {
    pub fn label(&self) -> &'static str {
        match self {
            Channel::Cavity => "cavity",
            Channel::Rydberg => "rydberg",
        }
    }
}

/// A collapse operator tagged with the detection channel it feeds.
#[derive(Debug, Clone)]
pub struct JumpOperator<T: Scalar> {
    pub op: SparseOperator<T>,
    pub channel: Channel,
}

/// Normalized (or intermediate unnormalized) state on a [`BasisSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Scalar> {
    basis: BasisSpec,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    pub fn new(basis: BasisSpec, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: basis.dimension(),
            });
        }
        Ok(Self { basis, amplitudes })
    }

    /// The basis state |E_k, n>.
    pub fn basis_state(basis: BasisSpec, k: usize, n: usize) -> Result<Self> {
        let idx = basis.flat_index(k, n)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); basis.dimension()];
        amplitudes[idx] = Complex::new(T::one(), T::zero());
        Ok(Self { basis, amplitudes })
    }

    /// The collective ground state with the cavity in vacuum, |E_0, 0>.
    pub fn ground(basis: BasisSpec) -> Self {
        Self::basis_state(basis, 0, 0).expect("|E_0, 0> exists in any valid basis")
    }

    pub fn basis(&self) -> BasisSpec {
        self.basis
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Rescale to unit norm. Errors on (near-)zero norm.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !n.is_finite() {
            return Err(Error::NonFinite("normalize"));
        }
        if n < T::of(1e-300).max(T::min_positive_value()) {
            return Err(Error::InvalidJump);
        }
        let inv = n.recip();
        for a in &mut self.amplitudes {
            *a = a.scale(inv);
        }
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// <self|other>.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            acc = acc + a.conj() * *b;
        }
        Ok(acc)
    }

    /// Population of each ladder level, traced over the photon factor.
    pub fn ladder_populations(&self) -> Vec<T> {
        let per = self.basis.photon_cutoff + 1;
        let mut pops = vec![T::zero(); self.basis.ladder_levels];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            pops[idx / per] = pops[idx / per] + a.norm_sqr();
        }
        pops
    }
}

/// Complex sparse matrix in canonical (row-major sorted, deduplicated) COO
/// form. Canonical ordering makes operator equality bit-exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator<T: Scalar> {
    dimension: usize,
    entries: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Scalar> SparseOperator<T> {
    /// Build from arbitrary (row, col, value) triples: bounds-checked, sorted
    /// row-major, duplicates summed, exact zeros dropped.
    pub fn from_entries(
        dimension: usize,
        entries: impl IntoIterator<Item = (usize, usize, Complex<T>)>,
    ) -> Result<Self> {
        let mut raw: Vec<(usize, usize, Complex<T>)> = entries.into_iter().collect();
        for &(r, c, _) in &raw {
            if r >= dimension || c >= dimension {
                return Err(Error::IndexOutOfRange {
                    what: "operator entry",
                    got: r.max(c),
                    limit: dimension,
                });
            }
        }
        raw.sort_by_key(|&(r, c, _)| (r, c));
        let mut entries = Vec::with_capacity(raw.len());
        for (r, c, v) in raw {
            match entries.last_mut() {
                Some(&mut (lr, lc, ref mut lv)) if lr == r && lc == c => {
                    *lv = *lv + v;
                }
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|&(_, _, v)| v.re != T::zero() || v.im != T::zero());
        Ok(Self { dimension, entries })
    }

    pub fn zero(dimension: usize) -> Self {
        Self {
            dimension,
            entries: Vec::new(),
        }
    }

    pub fn identity(dimension: usize) -> Self {
        let one = Complex::new(T::one(), T::zero());
        Self {
            dimension,
            entries: (0..dimension).map(|i| (i, i, one)).collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(usize, usize, Complex<T>)] {
        &self.entries
    }

    pub fn dagger(&self) -> Self {
        Self::from_entries(
            self.dimension,
            self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())),
        )
        .expect("transpose of valid entries is valid")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        Self::from_entries(
            self.dimension,
            self.entries.iter().chain(&other.entries).copied(),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self::from_entries(
            self.dimension,
            self.entries.iter().map(|&(r, c, v)| (r, c, v * factor)),
        )
        .expect("scaling preserves validity")
    }

    /// Sparse matrix product self * other.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        // other is row-major sorted; find each row range by binary search
        let row_range = |row: usize| {
            let start = other.entries.partition_point(|&(r, _, _)| r < row);
            let end = other.entries.partition_point(|&(r, _, _)| r <= row);
            start..end
        };
        let mut out = Vec::new();
        for &(r, k, v) in &self.entries {
            for &(_, c, w) in &other.entries[row_range(k)] {
                out.push((r, c, v * w));
            }
        }
        Self::from_entries(self.dimension, out)
    }

    /// y = A x on raw amplitude slices.
    pub fn apply_slice(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        debug_assert_eq!(x.len(), self.dimension);
        debug_assert_eq!(y.len(), self.dimension);
        for a in y.iter_mut() {
            *a = Complex::new(T::zero(), T::zero());
        }
        for &(r, c, v) in &self.entries {
            y[r] = y[r] + v * x[c];
        }
    }

    /// A|psi> (unnormalized).
    pub fn apply(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        if psi.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: psi.dimension(),
            });
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dimension];
        self.apply_slice(psi.amplitudes(), &mut out);
        StateVector::new(psi.basis(), out)
    }

    /// <psi|A|psi>.
    pub fn expectation(&self, psi: &StateVector<T>) -> Result<Complex<T>> {
        if psi.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: psi.dimension(),
            });
        }
        let x = psi.amplitudes();
        let mut acc = Complex::new(T::zero(), T::zero());
        for &(r, c, v) in &self.entries {
            acc = acc + x[r].conj() * v * x[c];
        }
        Ok(acc)
    }

    /// Max-norm of A - A^dagger; zero for Hermitian operators.
    pub fn hermiticity_defect(&self) -> T {
        let diff = self
            .sub(&self.dagger())
            .expect("same dimension by construction");
        diff.entries
            .iter()
            .map(|&(_, _, v)| v.norm_sqr().sqrt())
            .fold(T::zero(), T::max)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }
}

/// Cavity annihilation operator a: a|k, n> = sqrt(n)|k, n-1>, identity on the
/// ladder factor.
pub fn annihilation<T: Scalar>(basis: BasisSpec) -> SparseOperator<T> {
    let mut entries = Vec::new();
    for k in 0..basis.ladder_levels() {
        for n in 1..=basis.photon_cutoff() {
            let from = basis.flat_index(k, n).unwrap();
            let to = basis.flat_index(k, n - 1).unwrap();
            entries.push((to, from, Complex::new(T::of(n as f64).sqrt(), T::zero())));
        }
    }
    SparseOperator::from_entries(basis.dimension(), entries).expect("indices in range")
}

/// Photon number operator a^dagger a.
pub fn number_operator<T: Scalar>(basis: BasisSpec) -> SparseOperator<T> {
    let mut entries = Vec::new();
    for k in 0..basis.ladder_levels() {
        for n in 1..=basis.photon_cutoff() {
            let idx = basis.flat_index(k, n).unwrap();
            entries.push((idx, idx, Complex::new(T::of(n as f64), T::zero())));
        }
    }
    SparseOperator::from_entries(basis.dimension(), entries).expect("indices in range")
}

/// Collective raising operator sum_k g_k |E_k><E_{k-1}|, identity on the Fock
/// factor. `couplings[k-1]` is g_k; its length must be `ladder_levels - 1`.
pub fn ladder_raising<T: Scalar>(couplings: &[T], basis: BasisSpec) -> Result<SparseOperator<T>> {
    if couplings.len() != basis.ladder_levels() - 1 {
        return Err(Error::Config(format!(
            "ladder couplings length {} does not match ladder_levels - 1 = {}",
            couplings.len(),
            basis.ladder_levels() - 1
        )));
    }
    let mut entries = Vec::new();
    for (k, &g) in couplings.iter().enumerate() {
        for n in 0..=basis.photon_cutoff() {
            let from = basis.flat_index(k, n).unwrap();
            let to = basis.flat_index(k + 1, n).unwrap();
            entries.push((to, from, Complex::new(g, T::zero())));
        }
    }
    SparseOperator::from_entries(basis.dimension(), entries)
}

/// Collective lowering operator L with L|E_k, n> = sqrt(k)|E_{k-1}, n>, the
/// symmetric-channel de-excitation the Rydberg decay acts through.
pub fn ladder_lowering<T: Scalar>(basis: BasisSpec) -> SparseOperator<T> {
    let mut entries = Vec::new();
    for k in 1..basis.ladder_levels() {
        for n in 0..=basis.photon_cutoff() {
            let from = basis.flat_index(k, n).unwrap();
            let to = basis.flat_index(k - 1, n).unwrap();
            entries.push((to, from, Complex::new(T::of(k as f64).sqrt(), T::zero())));
        }
    }
    SparseOperator::from_entries(basis.dimension(), entries).expect("indices in range")
}

/// Total excitation number a^dagger a + sum_k k |E_k><E_k|.
pub fn excitation_number<T: Scalar>(basis: BasisSpec) -> SparseOperator<T> {
    let mut entries = Vec::new();
    for k in 0..basis.ladder_levels() {
        for n in 0..=basis.photon_cutoff() {
            if k + n == 0 {
                continue;
            }
            let idx = basis.flat_index(k, n).unwrap();
            entries.push((idx, idx, Complex::new(T::of((k + n) as f64), T::zero())));
        }
    }
    SparseOperator::from_entries(basis.dimension(), entries).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C64 = Complex<f64>;

    fn basis(levels: usize, cutoff: usize) -> BasisSpec {
        BasisSpec::new(levels, cutoff).unwrap()
    }

    #[test]
    fn flat_index_layout() {
        let b = basis(2, 4);
        assert_eq!(b.flat_index(0, 0).unwrap(), 0);
        assert_eq!(b.flat_index(1, 0).unwrap(), 5);
        assert!(b.flat_index(2, 0).is_err());
        assert!(b.flat_index(0, 5).is_err());
    }

    #[test]
    fn flat_index_roundtrip() {
        let b = basis(3, 3);
        for k in 0..3 {
            for n in 0..=3 {
                let idx = b.flat_index(k, n).unwrap();
                assert_eq!(b.unflatten(idx).unwrap(), (k, n));
            }
        }
    }

    #[test]
    fn flat_index_is_bijection_small_dims() {
        for levels in 2..=4 {
            for cutoff in 1..=4 {
                let b = basis(levels, cutoff);
                let mut seen = vec![false; b.dimension()];
                for k in 0..levels {
                    for n in 0..=cutoff {
                        let idx = b.flat_index(k, n).unwrap();
                        assert!(!seen[idx]);
                        seen[idx] = true;
                    }
                }
                assert!(seen.iter().all(|&s| s));
            }
        }
    }

    #[test]
    fn annihilation_on_fock_states() {
        let b = basis(2, 4);
        let a = annihilation::<f64>(b);
        let g2 = StateVector::basis_state(b, 0, 2).unwrap();
        let out = a.apply(&g2).unwrap();
        let idx = b.flat_index(0, 1).unwrap();
        assert!((out.amplitudes()[idx].re - 2f64.sqrt()).abs() < 1e-15);
        assert!((out.norm_sqr() - 2.0).abs() < 1e-15);

        let vac = StateVector::basis_state(b, 0, 0).unwrap();
        assert!(a.apply(&vac).unwrap().norm() < 1e-300);
    }

    #[test]
    fn number_expectation_on_superposition() {
        let b = basis(2, 4);
        let mut amps = vec![C64::new(0.0, 0.0); b.dimension()];
        let inv = 1.0 / 2f64.sqrt();
        amps[b.flat_index(0, 1).unwrap()] = C64::new(inv, 0.0);
        amps[b.flat_index(0, 3).unwrap()] = C64::new(inv, 0.0);
        let psi = StateVector::new(b, amps).unwrap();
        let n = number_operator::<f64>(b);
        let val = n.expectation(&psi).unwrap();
        assert!((val.re - 2.0).abs() < 1e-14);
        assert!(val.im.abs() < 1e-15);
    }

    #[test]
    fn expectation_of_number_on_fock_state() {
        let b = basis(2, 4);
        let psi = StateVector::basis_state(b, 0, 2).unwrap();
        let n = number_operator::<f64>(b);
        assert!((n.expectation(&psi).unwrap().re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_application_is_identity() {
        let b = basis(3, 2);
        let mut amps = vec![C64::new(0.0, 0.0); b.dimension()];
        for (i, a) in amps.iter_mut().enumerate() {
            *a = C64::new(0.1 * i as f64, -0.05 * i as f64);
        }
        let psi = StateVector::new(b, amps).unwrap();
        let id = SparseOperator::<f64>::identity(b.dimension());
        assert_eq!(id.apply(&psi).unwrap(), psi);
    }

    #[test]
    fn ladder_raising_two_level_structure() {
        let b = basis(2, 3);
        let g = 1.75f64;
        let op = ladder_raising(&[g], b).unwrap();
        // g |E><G| (x) identity on the Fock factor
        assert_eq!(op.entries().len(), b.photon_cutoff() + 1);
        for n in 0..=3 {
            let from = StateVector::basis_state(b, 0, n).unwrap();
            let out = op.apply(&from).unwrap();
            let idx = b.flat_index(1, n).unwrap();
            assert!((out.amplitudes()[idx].re - g).abs() < 1e-15);
        }
    }

    #[test]
    fn ladder_raising_blocks_only_offdiagonal() {
        let b = basis(3, 1);
        let op = ladder_raising(&[1.0, 2.0], b).unwrap();
        for &(r, c, _) in op.entries() {
            let (kr, nr) = b.unflatten(r).unwrap();
            let (kc, nc) = b.unflatten(c).unwrap();
            assert_eq!(kr, kc + 1);
            assert_eq!(nr, nc);
        }
    }

    #[test]
    fn ladder_raising_dagger_lowers() {
        let b = basis(3, 1);
        let g1 = 0.8f64;
        let op = ladder_raising(&[g1, 1.3], b).unwrap().dagger();
        let e1 = StateVector::basis_state(b, 1, 0).unwrap();
        let out = op.apply(&e1).unwrap();
        let idx = b.flat_index(0, 0).unwrap();
        assert!((out.amplitudes()[idx].re - g1).abs() < 1e-15);
        assert!((out.norm_sqr() - g1 * g1).abs() < 1e-15);
    }

    #[test]
    fn ladder_raising_rejects_bad_length() {
        let b = basis(3, 1);
        assert!(matches!(ladder_raising(&[1.0], b), Err(Error::Config(_))));
    }

    #[test]
    fn normalization_hits_unit_norm() {
        let b = basis(2, 4);
        let mut amps = vec![C64::new(0.0, 0.0); b.dimension()];
        for (i, a) in amps.iter_mut().enumerate() {
            *a = C64::new(1e-7 * (i as f64 + 1.0), -3e3 * (i as f64 - 4.5));
        }
        let psi = StateVector::new(b, amps).unwrap().normalized().unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() <= 1e-12);

        let zero = StateVector::new(b, vec![C64::new(0.0, 0.0); b.dimension()]).unwrap();
        assert!(zero.normalized().is_err());
    }

    #[test]
    fn canonical_ordering_merges_and_sorts() {
        let entries = vec![
            (1, 0, C64::new(1.0, 0.0)),
            (0, 1, C64::new(2.0, 0.0)),
            (1, 0, C64::new(-1.0, 0.0)),
            (0, 0, C64::new(3.0, 0.0)),
        ];
        let op = SparseOperator::from_entries(2, entries).unwrap();
        assert_eq!(
            op.entries(),
            &[(0, 0, C64::new(3.0, 0.0)), (0, 1, C64::new(2.0, 0.0))]
        );
    }

    #[test]
    fn matmul_matches_number_operator() {
        let b = basis(2, 5);
        let a = annihilation::<f64>(b);
        let n = a.dagger().matmul(&a).unwrap();
        let diff = n.sub(&number_operator::<f64>(b)).unwrap();
        let max = diff
            .entries()
            .iter()
            .map(|&(_, _, v)| v.norm_sqr().sqrt())
            .fold(0f64, f64::max);
        assert!(max <= 1e-14, "sqrt(n)^2 rounding {max}");
    }

    #[test]
    fn hermitian_expectation_is_real() {
        let b = basis(3, 3);
        let a = annihilation::<f64>(b);
        let h = a.add(&a.dagger()).unwrap();
        assert!(h.is_hermitian(1e-12));

        let mut amps = vec![C64::new(0.0, 0.0); b.dimension()];
        for (i, amp) in amps.iter_mut().enumerate() {
            *amp = C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.71).cos());
        }
        let psi = StateVector::new(b, amps).unwrap().normalized().unwrap();
        assert!(h.expectation(&psi).unwrap().im.abs() <= 1e-12);
    }

    proptest! {
        #[test]
        fn annihilation_norm_matches_number_expectation(
            seeds in proptest::collection::vec(-1.0f64..1.0, 24),
        ) {
            let b = basis(3, 3);
            let dim = b.dimension();
            let mut amps = vec![C64::new(0.0, 0.0); dim];
            for i in 0..dim {
                amps[i] = C64::new(seeds[2 * i % seeds.len()], seeds[(2 * i + 1) % seeds.len()]);
            }
            let psi = match StateVector::new(b, amps).unwrap().normalized() {
                Ok(p) => p,
                Err(_) => return Ok(()),
            };
            let a = annihilation::<f64>(b);
            let lhs = a.apply(&psi).unwrap().norm_sqr();
            let rhs = number_operator::<f64>(b).expectation(&psi).unwrap().re;
            let scale = lhs.abs().max(rhs.abs()).max(1e-30);
            prop_assert!((lhs - rhs).abs() / scale <= 1e-10);
        }

        #[test]
        fn dagger_is_involutive(rows in proptest::collection::vec((0usize..6, 0usize..6, -1.0f64..1.0, -1.0f64..1.0), 1..12)) {
            let entries: Vec<_> = rows
                .into_iter()
                .map(|(r, c, re, im)| (r, c, C64::new(re, im)))
                .collect();
            let op = SparseOperator::from_entries(6, entries).unwrap();
            prop_assert_eq!(op.dagger().dagger(), op);
        }
    }
}
