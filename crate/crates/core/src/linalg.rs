//! Dense complex linear algebra.
//!
//! [`CMat`] is the row-major carrier used throughout the crate. Spectral work
//! (Hermitian eigendecomposition, SVD, QR) is delegated to `nalgebra`; the
//! functions here add the tolerance gates and deterministic output ordering
//! the rest of the crate relies on.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical tolerances shared by every rank, positivity and inequality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Singular values at or below `rank_rel * sigma_max` count as zero.
    pub rank_rel: f64,
    /// Eigenvalue floor, scaled by the matrix norm where it is used.
    pub psd_abs: f64,
    /// Slack granted to scalar inequality checks.
    pub ineq_abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_rel: 1e-9,
            psd_abs: 1e-9,
            ineq_abs: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, psd_abs: f64, ineq_abs: f64) -> Result<Self> {
        for (name, v) in [("rank_rel", rank_rel), ("psd_abs", psd_abs), ("ineq_abs", ineq_abs)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("tolerance {name} must be > 0, got {v}")));
            }
        }
        Ok(Self {
            rank_rel,
            psd_abs,
            ineq_abs,
        })
    }
}

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
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

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    /// Column vector (n x 1).
    pub fn column_vector(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Rank-one matrix `u v*`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity, `max |m_ij - conj(m_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square(), "hermitian_defect needs a square matrix");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(m + m*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "mat_vec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `v* M v`.
    pub fn quadratic_form(&self, v: &[C64]) -> C64 {
        let mv = self.mat_vec(v);
        inner(v, &mv)
    }

    pub fn matmul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMat {
    type Output = CMat;

    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl Add for &CMat {
    type Output = CMat;

    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;

    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `<u, v>`, conjugate-linear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    assert_eq!(u.len(), v.len(), "inner product length mismatch");
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (br, bc) = b.shape();
    CMat::from_fn(a.rows * br, a.cols * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Kronecker product of column vectors.
pub fn kron_vec(u: &[C64], v: &[C64]) -> Vec<C64> {
    u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect()
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMat,
}

impl HermitianEig {
    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V diag(values) V*`.
    pub fn reconstruct(&self) -> CMat {
        let v = &self.vectors;
        let scaled = CMat::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * self.values[j]);
        &scaled * &v.adjoint()
    }
}

/// Rejects matrices whose anti-Hermitian part exceeds `psd_abs * ||m||_F`.
pub fn ensure_hermitian(m: &CMat, tol: &Tolerance) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let asymmetry = m.hermitian_defect();
    let allowed = tol.psd_abs * m.frobenius_norm();
    if asymmetry > allowed {
        return Err(Error::NotHermitian { asymmetry, allowed });
    }
    Ok(())
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// The input is symmetrized after the Hermiticity gate. Each eigenvector is
/// rotated so that its first non-negligible component is real and
/// non-negative, which makes the output deterministic for simple spectra.
pub fn hermitian_eig(m: &CMat, tol: &Tolerance) -> Result<HermitianEig> {
    ensure_hermitian(m, tol)?;
    let n = m.rows();
    let eig = nalgebra::SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: Vec<C64> = (0..n).map(|i| eig.eigenvectors[(i, src)]).collect();
        fix_phase(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            vectors[(i, dst)] = z;
        }
    }
    Ok(HermitianEig { values, vectors })
}

/// Multiplies `v` by a unit phase so its first non-negligible entry is real and
/// non-negative.
pub fn fix_phase(v: &mut [C64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-10 * scale).copied() {
        let phase = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let svd = nalgebra::linalg::SVD::new(m.to_nalgebra(), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Singular triplets `m ≈ Σ_k s_k u_k v_k*` for the numerically nonzero
/// singular values.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Left singular vectors as columns.
    pub u: CMat,
    /// Descending, all above `eps * (rows + cols) * s_max`.
    pub s: Vec<f64>,
    /// Right singular vectors as columns.
    pub v: CMat,
}

/// Thin SVD restricted to nonzero singular values.
///
/// Computed from the Hermitian eigendecomposition of `[[0, m], [m*, 0]]`,
/// whose eigenpairs `(±s_k, (u_k; ±v_k)/√2)` give the triplets directly.
/// (The general complex SVD in nalgebra occasionally mispairs singular
/// vectors of rank-deficient inputs.)
pub fn svd(m: &CMat) -> Svd {
    let (r, c) = m.shape();
    let n = r + c;
    let aug = CMat::from_fn(n, n, |i, j| match (i < r, j < r) {
        (true, false) => m[(i, j - r)],
        (false, true) => m[(j, i - r)].conj(),
        _ => ZERO,
    });
    let eig = hermitian_eig(&aug, &Tolerance::default()).expect("augmented matrix is Hermitian");
    let smax = eig.values.last().copied().unwrap_or(0.0);
    let cutoff = f64::EPSILON * n as f64 * smax;
    let (mut us, mut ss, mut vs) = (Vec::new(), Vec::new(), Vec::new());
    for k in (0..n).rev().take(r.min(c)) {
        let sigma = eig.values[k];
        if !(sigma > cutoff) {
            break;
        }
        let x = eig.vector(k);
        let (u, v) = x.split_at(r);
        let (nu, nv) = (norm(u), norm(v));
        us.push(u.iter().map(|z| z / nu).collect());
        vs.push(v.iter().map(|z| z / nv).collect());
        ss.push(sigma);
    }
    Svd {
        u: CMat::from_columns(r, &us),
        s: ss,
        v: CMat::from_columns(c, &vs),
    }
}

/// Number of singular values strictly above `rank_rel * sigma_max`.
pub fn svd_rank(m: &CMat, tol: &Tolerance) -> usize {
    rank_from_singular_values(&singular_values(m), tol)
}

pub fn rank_from_singular_values(s: &[f64], tol: &Tolerance) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol.rank_rel * smax).count()
}

/// Thin QR: orthonormal columns spanning the columns of `m` (rows >= cols).
pub fn orthonormalize(m: &CMat) -> (CMat, CMat) {
    let qr = m.to_nalgebra().qr();
    (CMat::from_nalgebra(&qr.q()), CMat::from_nalgebra(&qr.r()))
}

/// Result of [`min_gen_eig`].
#[derive(Debug, Clone)]
pub struct GenEig {
    pub value: f64,
    /// Normalized so that `x* b x = 1`.
    pub vector: Vec<C64>,
}

/// Minimizes `x* a x / x* b x` over the numerical range of `b`.
///
/// `b` is restricted to its eigenvectors with eigenvalue above
/// `psd_abs * ||b||`; the reduced standard problem is solved in the whitened
/// basis.
pub fn min_gen_eig(a: &CMat, b: &CMat, tol: &Tolerance) -> Result<GenEig> {
    if a.shape() != b.shape() {
        return Err(Error::DimMismatch(format!(
            "pencil shapes differ: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    ensure_hermitian(a, tol)?;
    let beig = hermitian_eig(b, tol)?;
    let bnorm = beig.max_abs_value();
    if !(bnorm > 0.0 && bnorm.is_finite()) {
        return Err(Error::DegeneratePencil);
    }
    if beig.min_value() < -tol.psd_abs * bnorm {
        return Err(Error::NotPsd {
            min_eigenvalue: beig.min_value(),
        });
    }
    let n = b.rows();
    let cutoff = tol.psd_abs * bnorm;
    let kept: Vec<usize> = (0..n).filter(|&k| beig.values[k] > cutoff).collect();
    // whitening map Q = V_+ diag(lambda_+^{-1/2})
    let q = CMat::from_fn(n, kept.len(), |i, j| {
        let k = kept[j];
        beig.vectors[(i, k)] / beig.values[k].sqrt()
    });
    let qh = q.adjoint();
    let reduced = &(&qh * a) * &q;
    let reig = hermitian_eig(&reduced.hermitian_part(), tol)?;
    let y = reig.vector(0);
    Ok(GenEig {
        value: reig.min_value(),
        vector: q.mat_vec(&y),
    })
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn random_gaussian_vec<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<C64> {
    random_gaussian(len, 1, rng).into_data()
}

/// `rows x cols` matrix with orthonormal columns, from QR of a Gaussian matrix.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    assert!(cols <= rows, "isometry needs cols <= rows");
    orthonormalize(&random_gaussian(rows, cols, rng)).0
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    random_isometry(n, n, rng)
}

/// Random Hermitian matrix `(G + G*) / 2`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    random_gaussian(n, n, rng).hermitian_part()
}
