//! Dense complex linear algebra for the small matrices this problem needs
//! (excitation blocks, density matrices, Liouvillians of dimension <= a few
//! thousand). Kept self-contained so the whole stack stays generic over the
//! scalar type.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hilbert::SparseOperator;
use crate::scalar::Scalar;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T: Scalar> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_sparse(op: &SparseOperator<T>) -> Self {
        let mut m = Self::zeros(op.dimension());
        for &(r, c, v) in op.entries() {
            m[(r, c)] = m[(r, c)] + v;
        }
        m
    }

    /// Dense submatrix of `op` restricted to the given basis indices.
    pub fn from_sparse_submatrix(op: &SparseOperator<T>, indices: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; op.dimension()];
        for (i, &idx) in indices.iter().enumerate() {
            pos[idx] = i;
        }
        let mut m = Self::zeros(indices.len());
        for &(r, c, v) in op.entries() {
            if pos[r] != usize::MAX && pos[c] != usize::MAX {
                m[(pos[r], pos[c])] = m[(pos[r], pos[c])] + v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = *a + *b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = *a - *b;
        }
        out
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = *a * factor;
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.re == T::zero() && aik.im == T::zero() {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let target = &mut out.data[i * n..(i + 1) * n];
                for (t, &o) in target.iter_mut().zip(orow) {
                    *t = *t + aik * o;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        debug_assert_eq!(x.len(), self.dim);
        let n = self.dim;
        let mut y = vec![Complex::new(T::zero(), T::zero()); n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = Complex::new(T::zero(), T::zero());
            for (a, b) in row.iter().zip(x) {
                acc = acc + *a * *b;
            }
            y[i] = acc;
        }
        y
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// (A + A^dagger)/2.
    pub fn hermitian_part(&self) -> Self {
        let half = Complex::new(T::of(0.5), T::zero());
        self.add(&self.dagger()).scale(half)
    }

    pub fn trace(&self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            acc = acc + self[(i, i)];
        }
        acc
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|v| v.norm_sqr().sqrt())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|v| v.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Max-norm distance to the adjoint.
    pub fn hermiticity_defect(&self) -> T {
        self.sub(&self.dagger()).max_abs()
    }

    /// Matrix exponential by scaling-and-squaring with a Taylor series.
    pub fn expm(&self) -> Self {
        let n = self.dim;
        // infinity norm as the scaling estimate
        let mut norm = T::zero();
        for i in 0..n {
            let row_sum = self
                .row(i)
                .iter()
                .map(|v| v.norm_sqr().sqrt())
                .fold(T::zero(), |a, b| a + b);
            norm = norm.max(row_sum);
        }
        let mut squarings = 0u32;
        let mut scale = T::one();
        while norm * scale > T::of(0.25) && squarings < 64 {
            scale = scale * T::of(0.5);
            squarings += 1;
        }
        let b = self.scale(Complex::new(scale, T::zero()));

        let mut sum = Self::identity(n);
        let mut term = Self::identity(n);
        let eps = T::epsilon() * T::of(0.25);
        for k in 1..=40 {
            term = term
                .matmul(&b)
                .scale(Complex::new(T::of(k as f64).recip(), T::zero()));
            sum = sum.add(&term);
            if term.max_abs() <= eps * sum.max_abs() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum);
        }
        sum
    }

    /// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian
    /// matrix, by cyclic complex Jacobi rotations.
    pub fn eigh(&self) -> Result<(Vec<T>, Matrix<T>)> {
        let n = self.dim;
        let defect = self.hermiticity_defect();
        let scale = self.max_abs().max(T::one());
        if defect > T::of(1e-8) * scale {
            return Err(Error::LinearSolve(format!(
                "eigh requires a Hermitian matrix (defect {:e})",
                defect.to64()
            )));
        }
        let mut a = self.hermitian_part();
        let mut v = Matrix::identity(n);
        if n <= 1 {
            let vals = (0..n).map(|i| a[(i, i)].re).collect();
            return Ok((vals, v));
        }

        let off = |m: &Matrix<T>| -> T {
            let mut acc = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    acc = acc + m[(p, q)].norm_sqr();
                }
            }
            acc.sqrt()
        };
        let tol = a.frobenius_norm().max(T::min_positive_value()) * T::epsilon() * T::of(4.0);

        for _sweep in 0..100 {
            if off(&a) <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let h = a[(p, q)];
                    let habs = h.norm_sqr().sqrt();
                    if habs <= tol * T::of(1e-3) {
                        continue;
                    }
                    let phase = h.unscale(habs); // e^{i arg h}
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (habs + habs);
                    let t = if tau == T::zero() {
                        T::one()
                    } else {
                        let sign = if tau > T::zero() { T::one() } else { -T::one() };
                        sign / (tau.abs() + (T::one() + tau * tau).sqrt())
                    };
                    let c = (T::one() + t * t).sqrt().recip();
                    let s = t * c;
                    let se = phase.scale(s);

                    for r in 0..n {
                        if r == p || r == q {
                            continue;
                        }
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        let new_rp = arp.scale(c) - se.conj() * arq;
                        let new_rq = se * arp + arq.scale(c);
                        a[(r, p)] = new_rp;
                        a[(p, r)] = new_rp.conj();
                        a[(r, q)] = new_rq;
                        a[(q, r)] = new_rq.conj();
                    }
                    a[(p, p)] = Complex::new(app - t * habs, T::zero());
                    a[(q, q)] = Complex::new(aqq + t * habs, T::zero());
                    a[(p, q)] = Complex::new(T::zero(), T::zero());
                    a[(q, p)] = Complex::new(T::zero(), T::zero());

                    for r in 0..n {
                        let vrp = v[(r, p)];
                        let vrq = v[(r, q)];
                        v[(r, p)] = vrp.scale(c) - se.conj() * vrq;
                        v[(r, q)] = se * vrp + vrq.scale(c);
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let vals: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).expect("finite eigenvalues"));
        let sorted_vals: Vec<T> = order.iter().map(|&i| vals[i]).collect();
        let mut sorted_vecs = Matrix::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                sorted_vecs[(r, new_col)] = v[(r, old_col)];
            }
        }
        Ok((sorted_vals, sorted_vecs))
    }

    pub fn eigvalsh(&self) -> Result<Vec<T>> {
        Ok(self.eigh()?.0)
    }

    /// Solve A x = b by LU with partial pivoting, plus one step of iterative
    /// refinement against the original matrix.
    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if b.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: b.len(),
            });
        }
        let lu = LuDecomposition::new(self.clone())?;
        let mut x = lu.solve(b);
        // one refinement pass: r = b - A x, x += A^{-1} r
        let ax = self.matvec(&x);
        let r: Vec<Complex<T>> = b.iter().zip(&ax).map(|(&bi, &axi)| bi - axi).collect();
        let dx = lu.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi = *xi + *di;
        }
        Ok(x)
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.dim + c]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.dim + c]
    }
}

/// LU factorization with partial pivoting.
pub struct LuDecomposition<T: Scalar> {
    lu: Matrix<T>,
    pivots: Vec<usize>,
}

impl<T: Scalar> LuDecomposition<T> {
    pub fn new(mut a: Matrix<T>) -> Result<Self> {
        let n = a.dim();
        let mut pivots = vec![0usize; n];
        let scale = a.max_abs().max(T::min_positive_value());
        let tiny = scale * T::epsilon() * T::of(n as f64);
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_mag = a[(col, col)].norm_sqr();
            for r in (col + 1)..n {
                let mag = a[(r, col)].norm_sqr();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = r;
                }
            }
            if pivot_mag.sqrt() <= tiny {
                return Err(Error::LinearSolve(format!(
                    "singular pivot {:e} at column {col} (scale {:e})",
                    pivot_mag.sqrt().to64(),
                    scale.to64()
                )));
            }
            pivots[col] = pivot_row;
            if pivot_row != col {
                for c in 0..n {
                    let tmp = a[(col, c)];
                    a[(col, c)] = a[(pivot_row, c)];
                    a[(pivot_row, c)] = tmp;
                }
            }
            let inv_pivot = Complex::new(T::one(), T::zero()) / a[(col, col)];
            for r in (col + 1)..n {
                let factor = a[(r, col)] * inv_pivot;
                a[(r, col)] = factor;
                if factor.re == T::zero() && factor.im == T::zero() {
                    continue;
                }
                for c in (col + 1)..n {
                    let val = a[(col, c)];
                    a[(r, c)] = a[(r, c)] - factor * val;
                }
            }
        }
        Ok(Self { lu: a, pivots })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.dim();
        let mut x = b.to_vec();
        for col in 0..n {
            x.swap(col, self.pivots[col]);
        }
        // forward substitution (unit lower triangle)
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc = acc - self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }
}
