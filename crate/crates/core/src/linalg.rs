//! Dense complex matrices and the handful of factorizations the rest of the
//! crate relies on.
//!
//! Matrices here never exceed a few hundred rows, so everything is stored
//! row-major in a flat `Vec`. Hermitian eigendecompositions are delegated to
//! `nalgebra`; SVDs use one-sided Jacobi rotations.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default absolute tolerance for exact algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Hermiticity tolerance used by input validation.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries. Fails if the length is not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: n, cols: m, data: rows.concat() })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self { rows, cols, data: entries.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(C64::conj).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest `|M[i][j] - conj(M[j][i])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Trace of the product `self * other` without forming it.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `U self U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.hermitian_eigen()?.0)
    }

    /// Eigenvalues (ascending) and the matching unit eigenvectors as columns.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "eigendecomposition of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        // symmetrize so that rounding noise cannot leak into the factorization
        let herm = Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()));
        let eig = herm.to_nalgebra().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Self::from_fn(self.rows, self.rows, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((values, vectors))
    }

    /// Thin SVD `self = U diag(s) V†`, singular values descending, by
    /// one-sided Jacobi rotations. Real input stays exactly real.
    pub fn svd(&self) -> Svd {
        if self.rows < self.cols {
            let t = self.adjoint().svd();
            return Svd { u: t.v, singular_values: t.singular_values, v: t.u };
        }
        let (m, n) = (self.rows, self.cols);
        // columns of `a` and `v` stored contiguously
        let mut a: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| self[(i, j)]).collect()).collect();
        let mut v: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect()).collect();
        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha: f64 = a[p].iter().map(C64::norm_sqr).sum();
                    let beta: f64 = a[q].iter().map(C64::norm_sqr).sum();
                    let gamma: C64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                    let g = gamma.norm();
                    if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma.conj() / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let sn = c * t;
                    for cols in [&mut a, &mut v] {
                        for k in 0..cols[p].len() {
                            let (x, y) = (cols[p][k], cols[q][k] * phase);
                            cols[p][k] = x * c - y * sn;
                            cols[q][k] = x * sn + y * c;
                        }
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let norms: Vec<f64> = a.iter().map(|col| col.iter().map(C64::norm_sqr).sum::<f64>().sqrt()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
        let u = Self::from_fn(m, n, |i, j| {
            let k = order[j];
            if norms[k] > 0.0 {
                a[k][i] / norms[k]
            } else {
                ZERO
            }
        });
        let v = Self::from_fn(n, n, |i, j| v[order[j]][i]);
        Svd { u, singular_values: order.iter().map(|&k| norms[k]).collect(), v }
    }

    /// Transposes the tensor factor `subsystem` (0-based) of an operator on
    /// `n` qubits, leaving the other factors alone.
    pub fn partial_transpose(&self, subsystem: usize) -> Result<Self> {
        let n = qubit_count(self.rows)?;
        if !self.is_square() {
            return Err(Error::DimensionMismatch("partial transpose of a non-square matrix".into()));
        }
        if subsystem >= n {
            return Err(Error::InvalidInput(format!("subsystem {subsystem} out of range for {n} qubits")));
        }
        let shift = n - 1 - subsystem;
        let mask = 1usize << shift;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            let (bi, bj) = ((i >> shift) & 1, (j >> shift) & 1);
            let ii = (i & !mask) | (bj << shift);
            let jj = (j & !mask) | (bi << shift);
            self[(ii, jj)]
        }))
    }

    /// Traces out every qubit not listed in `keep`; the kept qubits appear in
    /// the order given.
    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<Self> {
        let n = qubit_count(self.rows)?;
        if keep.iter().any(|&q| q >= n) {
            return Err(Error::InvalidInput("kept qubit out of range".into()));
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let dim = 1usize << k;
        let bit = |idx: usize, q: usize| (idx >> (n - 1 - q)) & 1;
        Ok(Self::from_fn(dim, dim, |a, b| {
            let mut acc = ZERO;
            for env in 0..(1usize << traced.len()) {
                let mut i = 0usize;
                let mut j = 0usize;
                for (pos, &q) in keep.iter().enumerate() {
                    i |= ((a >> (k - 1 - pos)) & 1) << (n - 1 - q);
                    j |= ((b >> (k - 1 - pos)) & 1) << (n - 1 - q);
                }
                for (pos, &q) in traced.iter().enumerate() {
                    let e = (env >> pos) & 1;
                    i |= e << (n - 1 - q);
                    j |= e << (n - 1 - q);
                }
                debug_assert_eq!(bit(i, traced.first().copied().unwrap_or(0)), bit(j, traced.first().copied().unwrap_or(0)));
                acc += self[(i, j)];
            }
            acc
        }))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let s = ComplexMatrix::diagonal(&self.singular_values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        debug_assert_eq!(s.rows(), k);
        self.u.matmul(&s).matmul(&self.v.adjoint())
    }
}

/// SVD of a real matrix, `a = U diag(s) Vᵀ`, singular values descending.
pub struct RealSvd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub fn real_svd(a: &DMatrix<f64>) -> RealSvd {
    let svd = ComplexMatrix::from_fn(a.nrows(), a.ncols(), |i, j| C64::new(a[(i, j)], 0.0)).svd();
    let real = |m: &ComplexMatrix| DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].re);
    RealSvd { u: real(&svd.u), singular_values: svd.singular_values, v: real(&svd.v) }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Number of qubits for a dimension `2^n`.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotQubitDimension(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Pauli matrix `σ_k` with `σ_0 = 1`.
pub fn pauli(k: usize) -> ComplexMatrix {
    let o = ZERO;
    let e = ONE;
    let entries = match k {
        0 => [e, o, o, e],
        1 => [o, e, e, o],
        2 => [o, -I, I, o],
        3 => [e, o, o, -e],
        _ => panic!("pauli index {k} out of range"),
    };
    ComplexMatrix { rows: 2, cols: 2, data: entries.to_vec() }
}

/// `[σ_x, σ_y, σ_z]`.
pub fn paulis() -> [ComplexMatrix; 3] {
    [pauli(1), pauli(2), pauli(3)]
}

#[derive(Clone, Debug)]
pub struct MinNormSolution {
    pub x: Vec<C64>,
    pub residual: f64,
    /// Numerical rank of the system matrix at the eigenvalue cutoff used.
    pub rank: usize,
}

/// Minimum-norm least-squares solution of `g x = rhs` for Hermitian positive
/// semidefinite `g` (a Gram matrix), with default cutoffs.
pub fn min_norm_solve(g: &ComplexMatrix, rhs: &[C64]) -> Result<MinNormSolution> {
    min_norm_solve_with(g, rhs, 1e-9, 1e-9)
}

/// Like [`min_norm_solve`]; eigenvalues below `cutoff * max(1, λ_max)` are
/// treated as zero and a residual above `residual_tol * max(1, |rhs|)` is an
/// error, signalling that `rhs` is outside the range of `g`.
pub fn min_norm_solve_with(g: &ComplexMatrix, rhs: &[C64], cutoff: f64, residual_tol: f64) -> Result<MinNormSolution> {
    if !g.is_square() || g.rows != rhs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} system with {} right-hand entries",
            g.rows,
            g.cols,
            rhs.len()
        )));
    }
    let (values, vectors) = g.hermitian_eigen()?;
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut x = vec![ZERO; rhs.len()];
    let mut rank = 0;
    for (k, &lambda) in values.iter().enumerate() {
        if lambda <= cutoff * scale {
            continue;
        }
        rank += 1;
        let coeff: C64 = (0..rhs.len()).map(|i| vectors[(i, k)].conj() * rhs[i]).sum::<C64>() / lambda;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += vectors[(i, k)] * coeff;
        }
    }
    let gx = g.matvec(&x);
    let residual = gx.iter().zip(rhs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let rhs_norm = rhs.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    let tolerance = residual_tol * rhs_norm.max(1.0);
    if residual > tolerance {
        return Err(Error::Residual { residual, tolerance });
    }
    Ok(MinNormSolution { x, residual, rank })
}

/// Determinant of a real 3×3 matrix.
pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}
