//! Bipartite density matrices and the state families used throughout the crate.
//!
//! Bell-diagonal eigenvalue convention. Writing `ρ = (I⊗I + Σ cᵢ σᵢ⊗σᵢ)/4`,
//! the closed-form square root uses
//!
//! | index | Bell state | eigenvalue            |
//! |-------|------------|-----------------------|
//! | λ₁    | `|Φ⁺⟩`     | `(1 + c₁ − c₂ + c₃)/4` |
//! | λ₂    | `|Φ⁻⟩`     | `(1 − c₁ + c₂ + c₃)/4` |
//! | λ₃    | `|Ψ⁺⟩`     | `(1 + c₁ + c₂ − c₃)/4` |
//! | λ₄    | `|Ψ⁻⟩`     | `(1 − c₁ − c₂ − c₃)/4` |
//!
//! which is the only assignment for which the sign pattern of `d₁, d₂, d₃`
//! reproduces the numerical square root (checked in the tests below).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, kron, partial_trace, pauli, ComplexMatrix, EigenDecomposition, Subsystem};
use crate::math;
use crate::rng::SplitMix64;
use crate::tol;
use crate::Complex64;

/// A bipartite density matrix on `a ⊗ b` together with its square root.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    sqrt: ComplexMatrix,
    d_a: usize,
    d_b: usize,
    min_eigenvalue: f64,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity. Traces off by more than
    /// [`tol::TRACE`] are rejected rather than renormalized.
    pub fn new(matrix: ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || matrix.dim() != d_a * d_b {
            return Err(Error::DimensionMismatch { expected: d_a * d_b, found: matrix.dim() });
        }
        matrix.ensure_hermitian()?;
        let matrix = matrix.hermitian_part();
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol::TRACE || trace.is_nan() {
            return Err(Error::InvalidTrace { trace, tolerance: tol::TRACE });
        }
        let eig = linalg::hermitian_eig(&matrix)?;
        Self::from_parts(matrix, &eig, d_a, d_b)
    }

    fn from_parts(matrix: ComplexMatrix, eig: &EigenDecomposition, d_a: usize, d_b: usize) -> Result<Self> {
        let min_eigenvalue = eig.eigenvalues[0];
        if min_eigenvalue < -tol::PSD {
            return Err(Error::NotPsd { eigenvalue: min_eigenvalue });
        }
        let sqrt = linalg::psd_sqrt_from_eig(eig, tol::PSD)?;
        Ok(Self { matrix, sqrt, d_a, d_b, min_eigenvalue })
    }

    /// A single-system state (`d_b = 1`).
    pub fn single(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.dim();
        Self::new(matrix, d, 1)
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `√ρ`, computed once at construction.
    #[inline]
    pub fn sqrt(&self) -> &ComplexMatrix {
        &self.sqrt
    }

    #[inline]
    pub fn d_a(&self) -> usize {
        self.d_a
    }

    #[inline]
    pub fn d_b(&self) -> usize {
        self.d_b
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        linalg::hs_norm_sq(&self.matrix)
    }

    /// Reduced state on one factor, returned as a single-system state.
    pub fn marginal(&self, which: Subsystem) -> DensityMatrix {
        let m = partial_trace(&self.matrix, self.d_a, self.d_b, which).expect("dims checked at construction");
        DensityMatrix::single(m).expect("partial trace of a state is a state")
    }

    /// `ρ_a ⊗ ρ_b` built from this state's marginals.
    pub fn product_of_marginals(&self) -> DensityMatrix {
        product(&self.marginal(Subsystem::A), &self.marginal(Subsystem::B))
    }

    /// Convex combination `p·self + (1 − p)·other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        if self.d_a != other.d_a || self.d_b != other.d_b {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter { name: "p", value: p });
        }
        let m = &self.matrix.scale(p) + &other.matrix.scale(1.0 - p);
        DensityMatrix::new(m, self.d_a, self.d_b)
    }

    /// `U ρ U†` for a unitary `U` on the full space.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.dim() });
        }
        u.ensure_unitary()?;
        let m = u.matmul(&self.matrix).matmul(&u.adjoint());
        DensityMatrix::new(m, self.d_a, self.d_b)
    }
}

/// Correlation vector of a two-qubit Bell-diagonal state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BellDiagonalParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BellDiagonalParams {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        for (name, v) in [("c1", c1), ("c2", c2), ("c3", c3)] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter { name, value: v });
            }
        }
        Ok(Self { c1, c2, c3 })
    }

    /// `c₁ = c₂ = c₃ = −c`.
    pub fn isotropic(c: f64) -> Result<Self> {
        Self::new(-c, -c, -c)
    }

    /// `[λ₁, λ₂, λ₃, λ₄]` for `|Φ⁺⟩, |Φ⁻⟩, |Ψ⁺⟩, |Ψ⁻⟩`.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let Self { c1, c2, c3 } = *self;
        [(1.0 + c1 - c2 + c3) / 4.0, (1.0 - c1 + c2 + c3) / 4.0, (1.0 + c1 + c2 - c3) / 4.0, (1.0 - c1 - c2 - c3) / 4.0]
    }

    fn check_physical(&self) -> Result<()> {
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -tol::PSD {
            return Err(Error::Unphysical { min_eigenvalue: min });
        }
        Ok(())
    }

    /// `(δ, [d₁, d₂, d₃])` of the closed-form square root.
    pub fn sqrt_coefficients(&self) -> Result<(f64, [f64; 3])> {
        self.check_physical()?;
        let [s1, s2, s3, s4] = self.eigenvalues().map(|l| math::sqrt(l.max(0.0)));
        let delta = s1 + s2 + s3 + s4;
        let d = [s1 - s2 + s3 - s4, -s1 + s2 + s3 - s4, s1 + s2 - s3 - s4];
        Ok((delta, d))
    }
}

fn pauli_sum(identity_coeff: f64, coeffs: [f64; 3]) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(4).scale(identity_coeff);
    for (c, s) in coeffs.into_iter().zip(pauli::all()) {
        m = &m + &kron(&s, &s).scale(c);
    }
    m.scale(0.25)
}

/// `(I⊗I + Σ cᵢ σᵢ⊗σᵢ)/4`.
pub fn bell_diagonal(p: BellDiagonalParams) -> Result<DensityMatrix> {
    let m = pauli_sum(1.0, [p.c1, p.c2, p.c3]);
    let eig = linalg::hermitian_eig(&m)?;
    if eig.eigenvalues[0] < -tol::PSD {
        return Err(Error::Unphysical { min_eigenvalue: eig.eigenvalues[0] });
    }
    DensityMatrix::from_parts(m, &eig, 2, 2)
}

/// `(δ I⊗I + Σ dᵢ σᵢ⊗σᵢ)/4` with `δ = Σ √λᵢ`.
pub fn bell_diagonal_sqrt_closed_form(p: BellDiagonalParams) -> Result<ComplexMatrix> {
    let (delta, d) = p.sqrt_coefficients()?;
    Ok(pauli_sum(delta, d))
}

/// Werner state on `d × d`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WernerParams {
    pub d: usize,
    pub y: f64,
}

impl WernerParams {
    pub fn new(d: usize, y: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter { name: "d", value: d as f64 });
        }
        if !(-1.0..=1.0).contains(&y) {
            return Err(Error::InvalidParameter { name: "y", value: y });
        }
        Ok(Self { d, y })
    }
}

/// Swap operator `F = Σ |α⟩⟨β| ⊗ |β⟩⟨α|` on `d ⊗ d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, |r, c| {
        let (a1, b1) = (r / d, r % d);
        let (a2, b2) = (c / d, c % d);
        if a1 == b2 && b1 == a2 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `ρ = (d − y)/(d³ − d)·I + (yd − 1)/(d³ − d)·F`.
pub fn werner(p: WernerParams) -> Result<DensityMatrix> {
    let WernerParams { d, y } = WernerParams::new(p.d, p.y)?;
    let df = d as f64;
    let norm = df * df * df - df;
    let m = &ComplexMatrix::identity(d * d).scale((df - y) / norm) + &swap_operator(d).scale((y * df - 1.0) / norm);
    DensityMatrix::new(m, d, d)
}

fn normalized_ket(v: &[Complex64]) -> Result<()> {
    let n = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
    if (n - 1.0).abs() > tol::NORMALIZATION || n.is_nan() {
        return Err(Error::NotNormalized { what: "state vector", norm: n });
    }
    Ok(())
}

/// `|ψ⟩⟨ψ|` on `d_a ⊗ d_b`.
pub fn pure(psi: &[Complex64], d_a: usize, d_b: usize) -> Result<DensityMatrix> {
    if psi.len() != d_a * d_b {
        return Err(Error::DimensionMismatch { expected: d_a * d_b, found: psi.len() });
    }
    normalized_ket(psi)?;
    DensityMatrix::new(ComplexMatrix::projector(psi), d_a, d_b)
}

/// `ρ_a ⊗ ρ_b`; both inputs are treated as single-system states.
pub fn product(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> DensityMatrix {
    let m = kron(rho_a.matrix(), rho_b.matrix());
    DensityMatrix::new(m, rho_a.dim(), rho_b.dim()).expect("product of states is a state")
}

/// `Σ_k p_k |k⟩⟨k| ⊗ ρ_k` where `|k⟩` are the columns of the unitary `basis`.
pub fn classical_correlated(probs: &[f64], basis: &ComplexMatrix, states_b: &[DensityMatrix]) -> Result<DensityMatrix> {
    let d_a = basis.dim();
    if probs.len() != d_a || states_b.len() != d_a {
        return Err(Error::DimensionMismatch { expected: d_a, found: probs.len().min(states_b.len()) });
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol::NORMALIZATION || probs.iter().any(|&p| p < 0.0) {
        return Err(Error::NotNormalized { what: "probability vector", norm: total });
    }
    basis.ensure_unitary()?;
    let d_b = states_b[0].dim();
    let mut m = ComplexMatrix::zeros(d_a * d_b);
    for (k, (p, rb)) in probs.iter().zip(states_b).enumerate() {
        if rb.dim() != d_b {
            return Err(Error::DimensionMismatch { expected: d_b, found: rb.dim() });
        }
        let ket: Vec<Complex64> = (0..d_a).map(|i| basis[(i, k)]).collect();
        m = &m + &kron(&ComplexMatrix::projector(&ket), rb.matrix()).scale(*p);
    }
    DensityMatrix::new(m, d_a, d_b)
}

/// Reduced state on `which`.
pub fn marginal(rho: &DensityMatrix, which: Subsystem) -> DensityMatrix {
    rho.marginal(which)
}

/// Whether `‖ρ − ρ_a ⊗ ρ_b‖_HS ≤ tol`.
pub fn is_product_state(rho: &DensityMatrix, tol: f64) -> bool {
    let prod = rho.product_of_marginals();
    linalg::hs_distance_sq(rho.matrix(), prod.matrix()).map(math::sqrt).is_ok_and(|d| d <= tol)
}

/// Ginibre-ensemble state `GG†/tr(GG†)` with `G` of shape `(d_a·d_b) × rank`.
pub fn random_density(d_a: usize, d_b: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let n = d_a * d_b;
    if rank == 0 || rank > n {
        return Err(Error::InvalidParameter { name: "rank", value: rank as f64 });
    }
    let mut rng = SplitMix64::new(seed);
    let mut g = alloc::vec![Complex64::new(0.0, 0.0); n * rank];
    for z in g.iter_mut() {
        *z = rng.complex_gaussian();
    }
    let mut m = ComplexMatrix::from_fn(n, |i, j| (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum());
    let tr = m.trace().re;
    m = m.scale(1.0 / tr).hermitian_part();
    DensityMatrix::new(m, d_a, d_b)
}
