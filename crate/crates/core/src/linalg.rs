//! Dense complex linear algebra for small Hermitian problems (dimension ≤ 16).
//!
//! Eigendecompositions use the cyclic complex Jacobi method, which is accurate
//! to a few ulps for the matrix sizes used here and is fully deterministic.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};
use crate::math;
use crate::tol;
use crate::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries; the entry count must be a perfect square.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let n = data.len();
        let dim = isqrt(n);
        if dim == 0 || dim * dim != n {
            return Err(Error::BadEntryCount { dim, found: n });
        }
        Ok(Self { dim, data })
    }

    /// Like [`Self::from_row_major`] but also rejects inputs that are not Hermitian
    /// within [`tol::HERMITIAN`]. The stored matrix is the Hermitian part.
    pub fn hermitian_from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let m = Self::from_row_major(data)?;
        m.ensure_hermitian()?;
        Ok(m.hermitian_part())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        assert_eq!(v.len(), w.len());
        Self::from_fn(v.len(), |i, j| v[i] * w[j].conj())
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &[Complex64]) -> Self {
        Self::outer(v, v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `M v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim).map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    /// Largest elementwise modulus of `M − M†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > tol::HERMITIAN || dev.is_nan() {
            return Err(Error::NotHermitian { max_deviation: dev });
        }
        Ok(())
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Max elementwise deviation of `U†U` from the identity.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn ensure_unitary(&self) -> Result<()> {
        let r = self.unitarity_residual();
        if r > tol::UNITARY || r.is_nan() {
            return Err(Error::NotUnitary { residual: r });
        }
        Ok(())
    }

    /// Hilbert–Schmidt norm `sqrt(tr M†M)`.
    pub fn hs_norm(&self) -> f64 {
        math::sqrt(hs_norm_sq(self))
    }
}

fn isqrt(n: usize) -> usize {
    let mut r = math::sqrt(n as f64) as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Spectrum of a Hermitian matrix with eigenvalues ascending and eigenvectors
/// stored as the columns of a unitary matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V f(Λ) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let m = ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k]).sum());
        m.hermitian_part()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let v = &self.eigenvectors;
        (0..v.dim()).map(|i| v[(i, k)]).collect()
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues are ascending; each eigenvector's largest-magnitude component
/// (first one on ties) is made real and positive.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    m.ensure_hermitian()?;
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = hs_norm_sq(&a).sqrt_or_zero();
    if scale > 0.0 {
        for _sweep in 0..64 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum();
            if math::sqrt(off) <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q, scale);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    // Stable sort keeps index order among exact ties.
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let mut pivot = 0;
        let mut best = -1.0;
        for i in 0..n {
            let mag = v[(i, k)].norm_sqr();
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        let z = v[(pivot, k)];
        let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { ONE };
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)] * phase;
        }
        vectors[(pivot, col)] = Complex64::new(vectors[(pivot, col)].re, 0.0);
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: vectors })
}

trait SqrtOrZero {
    fn sqrt_or_zero(self) -> f64;
}

impl SqrtOrZero for f64 {
    fn sqrt_or_zero(self) -> f64 {
        if self > 0.0 {
            math::sqrt(self)
        } else {
            0.0
        }
    }
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= 1e-300 || mag <= 1e-20 * scale {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase-reduce to the real symmetric 2x2 problem, then a classical rotation.
    let e = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + math::sqrt(1.0 + theta * theta));
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / math::sqrt(1.0 + t * t);
    let s = t * c;

    // J acts on columns p, q:  J = [[c, s], [-s·e*, c·e*]]
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -e.conj() * s;
    let jqq = e.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Eigenvalues with modulus below this multiple of the spectral radius are
/// rounding noise from the eigensolver and are treated as exact zeros before
/// taking square roots.
const SQRT_NOISE_FLOOR: f64 = 32.0 * f64::EPSILON;

/// Square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[-clamp_tol, 0)` are clamped to zero; anything more negative
/// is rejected with the offending eigenvalue.
pub fn psd_sqrt(m: &ComplexMatrix, clamp_tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    psd_sqrt_from_eig(&eig, clamp_tol)
}

pub(crate) fn psd_sqrt_from_eig(eig: &EigenDecomposition, clamp_tol: f64) -> Result<ComplexMatrix> {
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -clamp_tol {
        return Err(Error::NotPsd { eigenvalue: min });
    }
    let radius = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let floor = SQRT_NOISE_FLOOR * radius;
    Ok(eig.reconstruct_with(|l| if l <= floor { 0.0 } else { math::sqrt(l) }))
}

/// `tr(A† B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    check_same_dim(a, b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// `tr(A† A)`.
pub fn hs_norm_sq(a: &ComplexMatrix) -> f64 {
    a.data.iter().map(|z| z.norm_sqr()).sum()
}

/// `‖A − B‖²_HS`.
pub fn hs_distance_sq(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| (x - y).norm_sqr()).sum())
}

/// `Re tr(A B)` for Hermitian `A`, `B` without forming the product.
pub(crate) fn trace_product_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a.data[i * n + k] * b.data[k * n + i]).re;
        }
    }
    acc
}

/// `tr(A B)`.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    check_same_dim(a, b)?;
    let n = a.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a.data[i * n + k] * b.data[k * n + i];
        }
    }
    Ok(acc)
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(da * db, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)])
}

/// Which factor of `a ⊗ b` to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Subsystem {
    A,
    B,
}

/// Traces out the complementary factor and returns the reduced operator on `keep`.
pub fn partial_trace(m: &ComplexMatrix, d_a: usize, d_b: usize, keep: Subsystem) -> Result<ComplexMatrix> {
    if m.dim() != d_a * d_b {
        return Err(Error::DimensionMismatch { expected: d_a * d_b, found: m.dim() });
    }
    let idx = |i: usize, j: usize| i * d_b + j;
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(d_a, |i, k| (0..d_b).map(|j| m[(idx(i, j), idx(k, j))]).sum()),
        Subsystem::B => ComplexMatrix::from_fn(d_b, |j, l| (0..d_a).map(|i| m[(idx(i, j), idx(i, l))]).sum()),
    })
}

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dim(a, b)?;
    Ok(&a.matmul(b) - &b.matmul(a))
}

/// `(A ⊗ I) M (A ⊗ I)†` for `M` on `a ⊗ b` with `dim(A) = d_a`.
pub(crate) fn conjugate_local(op: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    let da = op.dim();
    let db = m.dim() / da;
    let n = m.dim();
    // T = (A ⊗ I) M
    let mut t = ComplexMatrix::zeros(n);
    for i in 0..da {
        for k in 0..da {
            let aik = op[(i, k)];
            if aik == ZERO {
                continue;
            }
            for j in 0..db {
                let dst = (i * db + j) * n;
                let src = (k * db + j) * n;
                for c in 0..n {
                    t.data[dst + c] += aik * m.data[src + c];
                }
            }
        }
    }
    // T (A† ⊗ I): column block l of output = Σ_k T[:, block k] conj(A[l,k])
    let mut out = ComplexMatrix::zeros(n);
    for r in 0..n {
        for l in 0..da {
            for k in 0..da {
                let alk = op[(l, k)].conj();
                if alk == ZERO {
                    continue;
                }
                for j in 0..db {
                    out.data[r * n + l * db + j] += t.data[r * n + k * db + j] * alk;
                }
            }
        }
    }
    out
}

/// `(A ⊗ I)` as a full matrix on `a ⊗ b`.
pub fn lift_a(op: &ComplexMatrix, d_b: usize) -> ComplexMatrix {
    kron(op, &ComplexMatrix::identity(d_b))
}

/// `(I ⊗ B)` as a full matrix on `a ⊗ b`.
pub fn lift_b(d_a: usize, op: &ComplexMatrix) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(d_a), op)
}

/// `exp(iH)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    let v = &eig.eigenvectors;
    let n = v.dim();
    let phases: Vec<Complex64> = eig.eigenvalues.iter().map(|&l| Complex64::new(math::cos(l), math::sin(l))).collect();
    Ok(ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum()))
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

/// Pauli matrices.
pub mod pauli {
    use super::{ComplexMatrix, ONE, ZERO};
    use crate::Complex64;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => -I,
            (1, 0) => I,
            _ => ZERO,
        })
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    /// `[σ_x, σ_y, σ_z]`.
    pub fn all() -> [ComplexMatrix; 3] {
        [x(), y(), z()]
    }
}
