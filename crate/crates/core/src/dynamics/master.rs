//! Lindblad master equation: density matrices, a fixed-step propagator and a
//! direct steady-state solver. These are the exact oracles the stochastic
//! trajectories are validated against.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{JumpOperator, SparseOperator, StateVector};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Densest system the propagator accepts (dimension^2 unknowns per step stay
/// tractable).
pub const MASTER_DIM_CAP: usize = 256;

/// Densest system the direct steady-state solve accepts (the Liouvillian is a
/// dimension^2 x dimension^2 dense matrix).
pub const STEADY_STATE_DIM_CAP: usize = 64;

/// Validated density matrix: Hermitian, unit trace, positive semidefinite
/// within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    mat: Matrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// |psi><psi| of a normalized state.
    pub fn from_pure(psi: &StateVector<T>) -> Result<Self> {
        if (psi.norm() - T::one()).abs() > T::tol_exact().sqrt() {
            return Err(Error::parameter("psi", "state must be normalized"));
        }
        let dim = psi.dimension();
        let a = psi.amplitudes();
        let mut mat = Matrix::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                mat[(r, c)] = a[r] * a[c].conj();
            }
        }
        Ok(Self { mat })
    }

    /// Validate and wrap a raw matrix: Hermitian to 1e-10, trace 1 +- 1e-9,
    /// minimum eigenvalue >= -1e-8 (f64 scale; relaxed in f32).
    pub fn from_matrix(mat: Matrix<T>) -> Result<Self> {
        let scale = mat.max_abs().max(T::one());
        if mat.hermiticity_defect() > T::tol_solver() * scale {
            return Err(Error::parameter("rho", "matrix is not Hermitian"));
        }
        let tr = mat.trace();
        if (tr.re - T::one()).abs() > T::of(1e-9).max(T::tol_solver() * T::of(10.0))
            || tr.im.abs() > T::tol_solver()
        {
            return Err(Error::parameter(
                "rho",
                format!("trace {} != 1", tr.re.to64()),
            ));
        }
        let hermitized = mat.hermitian_part();
        let eigs = hermitized.eigvalsh()?;
        let floor = -T::of(1e-8).max(T::tol_solver() * T::of(100.0));
        if eigs.iter().any(|&e| e < floor) {
            return Err(Error::parameter(
                "rho",
                format!("negative eigenvalue {:e}", eigs[0].to64()),
            ));
        }
        Ok(Self { mat: hermitized })
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.mat
    }

    /// Tr(rho O).
    pub fn expectation(&self, op: &SparseOperator<T>) -> Result<Complex<T>> {
        if op.dimension() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: op.dimension(),
                right: self.dim(),
            });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for &(r, c, v) in op.entries() {
            acc = acc + v * self.mat[(c, r)];
        }
        Ok(acc)
    }

    /// Diagonal populations.
    pub fn populations(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// Trace distance (1/2) ||rho - sigma||_1.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let diff = self.mat.sub(&other.mat);
        let eigs = diff.eigvalsh()?;
        Ok(eigs.iter().map(|e| e.abs()).sum::<T>() * T::of(0.5))
    }
}

/// Apply the Lindblad generator
/// L(rho) = -i[H, rho] + sum_m (C_m rho C_m^dag - 1/2 {C_m^dag C_m, rho}).
fn lindblad_apply<T: Scalar>(
    h: &SparseOperator<T>,
    jumps: &[(SparseOperator<T>, SparseOperator<T>, SparseOperator<T>)],
    rho: &Matrix<T>,
    out: &mut Matrix<T>,
    scratch: &mut Matrix<T>,
) {
    for v in out.data_mut() {
        *v = Complex::new(T::zero(), T::zero());
    }
    // -i (H rho - rho H)
    let minus_i = Complex::new(T::zero(), -T::one());
    sparse_left_into(h, rho, out, minus_i);
    sparse_right_into(rho, h, out, -minus_i);
    for (c, c_dag, cdagc) in jumps {
        // C rho C^dag
        for v in scratch.data_mut() {
            *v = Complex::new(T::zero(), T::zero());
        }
        sparse_left_into(c, rho, scratch, Complex::new(T::one(), T::zero()));
        sparse_right_into(scratch, c_dag, out, Complex::new(T::one(), T::zero()));
        // -1/2 {C^dag C, rho}
        let minus_half = Complex::new(-T::of(0.5), T::zero());
        sparse_left_into(cdagc, rho, out, minus_half);
        sparse_right_into(rho, cdagc, out, minus_half);
    }
}

/// out += factor * (A rho) for sparse A, dense rho.
fn sparse_left_into<T: Scalar>(
    a: &SparseOperator<T>,
    rho: &Matrix<T>,
    out: &mut Matrix<T>,
    factor: Complex<T>,
) {
    let dim = rho.dim();
    for &(r, c, v) in a.entries() {
        let w = v * factor;
        let src = c * dim;
        let dst = r * dim;
        let (rho_data, out_data) = (rho.data(), out.data_mut());
        for j in 0..dim {
            out_data[dst + j] = out_data[dst + j] + w * rho_data[src + j];
        }
    }
}

/// out += factor * (rho A) for dense rho, sparse A.
fn sparse_right_into<T: Scalar>(
    rho: &Matrix<T>,
    a: &SparseOperator<T>,
    out: &mut Matrix<T>,
    factor: Complex<T>,
) {
    let dim = rho.dim();
    for &(r, c, v) in a.entries() {
        let w = v * factor;
        let (rho_data, out_data) = (rho.data(), out.data_mut());
        for i in 0..dim {
            out_data[i * dim + c] = out_data[i * dim + c] + w * rho_data[i * dim + r];
        }
    }
}

fn prepare_jumps<T: Scalar>(
    jumps: &[JumpOperator<T>],
) -> Result<Vec<(SparseOperator<T>, SparseOperator<T>, SparseOperator<T>)>> {
    jumps
        .iter()
        .map(|j| {
            let dag = j.op.dagger();
            let cdagc = dag.matmul(&j.op)?;
            Ok((j.op.clone(), dag, cdagc))
        })
        .collect()
}

/// Propagate rho0 to t_final with fixed-step classical 4th-order integration
/// of the Lindblad equation. Trace preservation is checked to 1e-8.
pub fn master_propagate<T: Scalar>(
    h: &SparseOperator<T>,
    jumps: &[JumpOperator<T>],
    rho0: &DensityMatrix<T>,
    t_final: T,
    dt: T,
) -> Result<DensityMatrix<T>> {
    let mut out = master_propagate_at(h, jumps, rho0, &[t_final], dt)?;
    Ok(out.pop().expect("one checkpoint requested"))
}

/// Propagate and return the state at each requested time (ascending).
pub fn master_propagate_at<T: Scalar>(
    h: &SparseOperator<T>,
    jumps: &[JumpOperator<T>],
    rho0: &DensityMatrix<T>,
    times: &[T],
    dt: T,
) -> Result<Vec<DensityMatrix<T>>> {
    let dim = h.dimension();
    if dim > MASTER_DIM_CAP {
        return Err(Error::CapExceeded {
            what: "master-equation propagation",
            dim,
            cap: MASTER_DIM_CAP,
        });
    }
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: rho0.dim(),
        });
    }
    if !(dt > T::zero()) {
        return Err(Error::parameter("dt", "must be > 0"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|&t| t < T::zero()) {
        return Err(Error::parameter("times", "must be ascending and >= 0"));
    }
    let prepared = prepare_jumps(jumps)?;

    let mut rho = rho0.matrix().clone();
    let mut k1 = Matrix::zeros(dim);
    let mut k2 = Matrix::zeros(dim);
    let mut k3 = Matrix::zeros(dim);
    let mut k4 = Matrix::zeros(dim);
    let mut stage = Matrix::zeros(dim);
    let mut scratch = Matrix::zeros(dim);

    let mut outputs = Vec::with_capacity(times.len());
    let mut t = T::zero();
    for &target in times {
        let span = target - t;
        if span > T::zero() {
            let n_steps = (span / dt).to64().ceil().max(1.0) as usize;
            let h_step = span / T::of(n_steps as f64);
            let half = h_step * T::of(0.5);
            let sixth = h_step / T::of(6.0);
            let third = h_step / T::of(3.0);
            for _ in 0..n_steps {
                lindblad_apply(h, &prepared, &rho, &mut k1, &mut scratch);
                stage_from(&rho, &k1, half, &mut stage);
                lindblad_apply(h, &prepared, &stage, &mut k2, &mut scratch);
                stage_from(&rho, &k2, half, &mut stage);
                lindblad_apply(h, &prepared, &stage, &mut k3, &mut scratch);
                stage_from(&rho, &k3, h_step, &mut stage);
                lindblad_apply(h, &prepared, &stage, &mut k4, &mut scratch);
                let rho_data = rho.data_mut();
                for i in 0..rho_data.len() {
                    rho_data[i] = rho_data[i]
                        + k1.data()[i].scale(sixth)
                        + k2.data()[i].scale(third)
                        + k3.data()[i].scale(third)
                        + k4.data()[i].scale(sixth);
                }
            }
            t = target;
        }
        let tr = rho.trace();
        if (tr.re - T::one()).abs() > T::of(1e-8) || tr.im.abs() > T::of(1e-8) {
            return Err(Error::IntegratorStep {
                t_us: t.to64(),
                reason: format!("trace drifted to {}", tr.re.to64()),
            });
        }
        outputs.push(DensityMatrix::from_matrix(rho.clone())?);
    }
    Ok(outputs)
}

fn stage_from<T: Scalar>(rho: &Matrix<T>, k: &Matrix<T>, factor: T, out: &mut Matrix<T>) {
    let out_data = out.data_mut();
    for i in 0..out_data.len() {
        out_data[i] = rho.data()[i] + k.data()[i].scale(factor);
    }
}

/// Unique stationary state of the Lindblad generator, solved directly as a
/// linear system with the trace constraint replacing one redundant row.
/// Residual is verified to ||L(rho)||_max <= 1e-10.
pub fn steady_state<T: Scalar>(
    h: &SparseOperator<T>,
    jumps: &[JumpOperator<T>],
) -> Result<DensityMatrix<T>> {
    let dim = h.dimension();
    if dim > STEADY_STATE_DIM_CAP {
        return Err(Error::CapExceeded {
            what: "steady-state solve",
            dim,
            cap: STEADY_STATE_DIM_CAP,
        });
    }
    let prepared = prepare_jumps(jumps)?;
    let d2 = dim * dim;
    let mut liouville = Matrix::zeros(d2);
    let minus_i = Complex::new(T::zero(), -T::one());
    let plus_i = Complex::new(T::zero(), T::one());
    let minus_half = Complex::new(-T::of(0.5), T::zero());

    // -i H rho: row (r, j) <- col (c, j); +i rho H: row (i, c) <- col (i, r)
    for &(r, c, v) in h.entries() {
        for j in 0..dim {
            let row = r * dim + j;
            let col = c * dim + j;
            liouville[(row, col)] = liouville[(row, col)] + v * minus_i;
        }
        for i in 0..dim {
            let row = i * dim + c;
            let col = i * dim + r;
            liouville[(row, col)] = liouville[(row, col)] + v * plus_i;
        }
    }
    for (c_op, _, cdagc) in &prepared {
        for &(i, k, v1) in c_op.entries() {
            for &(j, l, v2) in c_op.entries() {
                let row = i * dim + j;
                let col = k * dim + l;
                liouville[(row, col)] = liouville[(row, col)] + v1 * v2.conj();
            }
        }
        for &(r, c, w) in cdagc.entries() {
            for j in 0..dim {
                let row = r * dim + j;
                let col = c * dim + j;
                liouville[(row, col)] = liouville[(row, col)] + w * minus_half;
            }
            for i in 0..dim {
                let row = i * dim + c;
                let col = i * dim + r;
                liouville[(row, col)] = liouville[(row, col)] + w * minus_half;
            }
        }
    }

    // replace the rho_00 row (linearly dependent through trace preservation)
    // with the trace constraint
    for col in 0..d2 {
        liouville[(0, col)] = Complex::new(T::zero(), T::zero());
    }
    for k in 0..dim {
        liouville[(0, k * dim + k)] = Complex::new(T::one(), T::zero());
    }
    let mut rhs = vec![Complex::new(T::zero(), T::zero()); d2];
    rhs[0] = Complex::new(T::one(), T::zero());

    let solution = liouville.solve(&rhs).map_err(|e| {
        Error::DegenerateSteadyState(format!(
            "Liouvillian solve failed ({e}); the stationary state may not be unique"
        ))
    })?;

    let mut rho = Matrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            rho[(r, c)] = solution[r * dim + c];
        }
    }
    let rho = rho.hermitian_part();
    let tr = rho.trace().re;
    if tr.abs() < T::of(0.5) {
        return Err(Error::DegenerateSteadyState(format!(
            "solution trace {} far from 1",
            tr.to64()
        )));
    }
    let rho = rho.scale(Complex::new(tr.recip(), T::zero()));

    // residual check through an independent application of the generator
    let mut resid = Matrix::zeros(dim);
    let mut scratch = Matrix::zeros(dim);
    lindblad_apply(h, &prepared, &rho, &mut resid, &mut scratch);
    let resid_norm = resid.max_abs();
    if resid_norm > T::tol_solver() {
        return Err(Error::DegenerateSteadyState(format!(
            "stationary residual {:e} above tolerance {:e}",
            resid_norm.to64(),
            T::tol_solver().to64()
        )));
    }
    DensityMatrix::from_matrix(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::number_operator;
    use crate::models::{build_ladder_hamiltonian, jump_operators, Branch, PhysicalParams, Preset};
    use crate::units::mhz;

    fn decay_only_params() -> PhysicalParams<f64> {
        let mut p = PhysicalParams::<f64>::default();
        p.n_max = 1;
        p.g0 = 0.0;
        p.gamma = 0.0;
        p
    }

    #[test]
    fn single_photon_decay_closed_form() {
        let p = decay_only_params();
        let h = SparseOperator::zero(p.basis().unwrap().dimension());
        let jumps = jump_operators(&p).unwrap();
        let basis = p.basis().unwrap();
        let psi0 = StateVector::basis_state(basis, 0, 1).unwrap();
        let rho0 = DensityMatrix::from_pure(&psi0).unwrap();
        let kappa: f64 = p.kappa;
        let t = 1.0 / kappa;
        let rho = master_propagate(&h, &jumps, &rho0, t, 1e-4).unwrap();
        let n = rho.expectation(&number_operator(basis)).unwrap().re;
        assert!(
            (n - (-1.0f64).exp()).abs() <= 1e-6,
            "<n>(1/kappa) = {n}, expected e^-1"
        );
        // populations (e^{-kappa t}, 1 - e^{-kappa t})
        let pops = rho.populations();
        let idx1 = basis.flat_index(0, 1).unwrap();
        let idx0 = basis.flat_index(0, 0).unwrap();
        assert!((pops[idx1] - (-1.0f64).exp()).abs() <= 1e-6);
        assert!((pops[idx0] - (1.0 - (-1.0f64).exp())).abs() <= 1e-6);
    }

    #[test]
    fn unitary_propagation_matches_dense_exponential() {
        let mut p = PhysicalParams::<f64>::default();
        p.n_max = 2;
        p.alpha = mhz(0.4);
        p.delta_probe = 3.0;
        let h = build_ladder_hamiltonian(&p).unwrap();
        let basis = p.basis().unwrap();
        let psi0 = StateVector::basis_state(basis, 0, 1).unwrap();
        let rho0 = DensityMatrix::from_pure(&psi0).unwrap();
        let t = 0.37;
        let rho = master_propagate(&h, &[], &rho0, t, 2e-5).unwrap();

        let u = Matrix::from_sparse(&h).scale(Complex::new(0.0, -t)).expm();
        let expected = u.matmul(rho0.matrix()).matmul(&u.dagger());
        let diff = rho.matrix().sub(&expected).max_abs();
        assert!(diff <= 1e-8, "propagator mismatch {diff}");
    }

    #[test]
    fn undriven_ground_state_is_stationary() {
        let mut p = PhysicalParams::<f64>::default();
        p.n_max = 2;
        p.alpha = 0.0;
        let h = build_ladder_hamiltonian(&p).unwrap();
        let jumps = jump_operators(&p).unwrap();
        let basis = p.basis().unwrap();
        let rho0 = DensityMatrix::from_pure(&StateVector::ground(basis)).unwrap();
        let rho = master_propagate(&h, &jumps, &rho0, 5.0, 1e-3).unwrap();
        let diff = rho.matrix().sub(rho0.matrix()).max_abs();
        assert!(diff <= 1e-12);
    }

    #[test]
    fn steady_state_undriven_is_ground() {
        let mut p = PhysicalParams::<f64>::default();
        p.n_max = 2;
        p.alpha = 0.0;
        let h = build_ladder_hamiltonian(&p).unwrap();
        let jumps = jump_operators(&p).unwrap();
        let rho = steady_state(&h, &jumps).unwrap();
        let pops = rho.populations();
        assert!((pops[0] - 1.0).abs() <= 1e-10);
        assert!(pops.iter().skip(1).all(|&x| x.abs() <= 1e-10));
    }

    #[test]
    fn steady_state_agrees_with_long_propagation() {
        let mut p = PhysicalParams::<f64>::default();
        p.n_max = 3;
        Preset::Fig3.apply(&mut p, Branch::Upper).unwrap();
        p.alpha = mhz(0.05);
        let h = build_ladder_hamiltonian(&p).unwrap();
        let jumps = jump_operators(&p).unwrap();
        let ss = steady_state(&h, &jumps).unwrap();
        let rho0 = DensityMatrix::from_pure(&StateVector::ground(p.basis().unwrap())).unwrap();
        // the slowest Liouvillian mode relaxes at kappa/4 (dressed-line
        // coherence damping), so 1e-6 agreement needs ~50 cavity lifetimes
        let t = 50.0 / p.kappa;
        let rho = master_propagate(&h, &jumps, &rho0, t, 5e-4).unwrap();
        let dist = ss.trace_distance(&rho).unwrap();
        assert!(dist <= 1e-6, "trace distance {dist}");
    }

    #[test]
    fn steady_state_detects_degeneracy() {
        // no coupling, no drive, no Rydberg decay: |G,0> and |E,0> are both
        // stationary
        let mut p = PhysicalParams::<f64>::default();
        p.g0 = 0.0;
        p.gamma = 0.0;
        p.alpha = 0.0;
        p.n_max = 1;
        let h = build_ladder_hamiltonian(&p).unwrap();
        let jumps = jump_operators(&p).unwrap();
        assert!(matches!(
            steady_state(&h, &jumps),
            Err(Error::DegenerateSteadyState(_))
        ));
    }

    #[test]
    fn caps_enforced() {
        let basis = crate::hilbert::BasisSpec::new(2, 200).unwrap();
        let h = SparseOperator::<f64>::zero(basis.dimension());
        let psi = StateVector::ground(basis);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        assert!(matches!(
            master_propagate(&h, &[], &rho, 1.0, 1e-3),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            steady_state(&h, &[]),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let mut bad = Matrix::<f64>::zeros(2);
        bad[(0, 0)] = Complex::new(1.5, 0.0);
        bad[(1, 1)] = Complex::new(-0.5, 0.0);
        assert!(DensityMatrix::from_matrix(bad).is_err()); // negative eigenvalue

        let mut ok = Matrix::<f64>::zeros(2);
        ok[(0, 0)] = Complex::new(0.25, 0.0);
        ok[(1, 1)] = Complex::new(0.75, 0.0);
        ok[(0, 1)] = Complex::new(0.1, 0.2);
        ok[(1, 0)] = Complex::new(0.1, -0.2);
        let dm = DensityMatrix::from_matrix(ok).unwrap();
        assert!((dm.populations()[1] - 0.75).abs() < 1e-15);
    }
}
