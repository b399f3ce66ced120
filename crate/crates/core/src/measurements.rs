//! Projective measurements on subsystem `a` and the weak two-outcome family.
//!
//! A weak measurement of strength `x` splits the projective basis into two
//! blocks `Π¹ = Σ_{i<k} Πᵢ`, `Π² = Σ_{i≥k} Πᵢ` and uses
//!
//! ```text
//! Ω_{+x} = τ₁ Π¹ + τ₂ Π²,   Ω_{−x} = τ₂ Π¹ + τ₁ Π²,
//! τ₁ = sqrt((1 − tanh x)/2),   τ₂ = sqrt((1 + tanh x)/2).
//! ```
//!
//! The induced channel is `Ω(M) = τ M + (1 − τ) B(M)` with `τ = sech x` and
//! `B` the dephasing in the two blocks. For qubits the blocks are the basis
//! projectors themselves and `B` is the von Neumann channel `Π^a`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, conjugate_local, ComplexMatrix};
use crate::math;
use crate::tol;
use crate::Complex64;

/// How a measurement basis was parameterized.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MeasurementParams {
    /// Qubit basis along `(sinθ cosφ, sinθ sinφ, cosθ)`.
    Bloch { theta: f64, phi: f64 },
    /// `U = exp(iH)` with `H` built from `d²` reals by [`hermitian_from_params`].
    Generator(Vec<f64>),
    /// Columns of an explicitly supplied unitary.
    Basis,
}

/// Complete set of orthogonal rank-1 projectors on subsystem `a`.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    basis: ComplexMatrix,
    projectors: Vec<ComplexMatrix>,
    params: MeasurementParams,
}

impl ProjectiveMeasurement {
    fn from_basis(basis: ComplexMatrix, params: MeasurementParams) -> Self {
        let d = basis.dim();
        let projectors = (0..d)
            .map(|k| {
                let ket: Vec<Complex64> = (0..d).map(|i| basis[(i, k)]).collect();
                ComplexMatrix::projector(&ket)
            })
            .collect();
        Self { basis, projectors, params }
    }

    /// Validates an explicit projector list.
    pub fn from_projectors(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let d = projectors.len();
        if d == 0 || projectors.iter().any(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: projectors.first().map_or(0, |p| p.dim()) });
        }
        let mut residual = 0.0f64;
        let mut sum = ComplexMatrix::zeros(d);
        for (i, p) in projectors.iter().enumerate() {
            p.ensure_hermitian()?;
            residual = residual.max((p.trace().re - 1.0).abs());
            for (j, q) in projectors.iter().enumerate() {
                let pq = p.matmul(q);
                let target = if i == j { p.clone() } else { ComplexMatrix::zeros(d) };
                residual = residual.max(pq.max_abs_diff(&target));
            }
            sum = &sum + p;
        }
        residual = residual.max(sum.max_abs_diff(&ComplexMatrix::identity(d)));
        if residual > tol::PROJECTOR || residual.is_nan() {
            return Err(Error::InvalidMeasurement { residual });
        }
        // Recover a basis from the range of each projector.
        let basis = ComplexMatrix::from_fn(d, |_, _| Complex64::new(0.0, 0.0));
        let mut basis = basis;
        for (k, p) in projectors.iter().enumerate() {
            let eig = linalg::hermitian_eig(p)?;
            let v = eig.eigenvector(d - 1);
            for i in 0..d {
                basis[(i, k)] = v[i];
            }
        }
        Ok(Self { basis, projectors, params: MeasurementParams::Basis })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// Unitary whose columns are the measurement basis.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn params(&self) -> &MeasurementParams {
        &self.params
    }

    /// The measurement in basis `U|k⟩` where `|k⟩` is this basis.
    pub fn transported(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.dim() });
        }
        u.ensure_unitary()?;
        let basis = u.matmul(&self.basis);
        let params = if self.dim() == 2 {
            let (theta, phi) = bloch_angles(&basis);
            MeasurementParams::Bloch { theta, phi }
        } else {
            MeasurementParams::Basis
        };
        Ok(Self::from_basis(basis, params))
    }

    /// Max residual of orthogonality, idempotence and completeness.
    pub fn residual(&self) -> f64 {
        let d = self.dim();
        let mut r = 0.0f64;
        let mut sum = ComplexMatrix::zeros(d);
        for (i, p) in self.projectors.iter().enumerate() {
            for (j, q) in self.projectors.iter().enumerate() {
                let target = if i == j { p.clone() } else { ComplexMatrix::zeros(d) };
                r = r.max(p.matmul(q).max_abs_diff(&target));
            }
            sum = &sum + p;
        }
        r.max(sum.max_abs_diff(&ComplexMatrix::identity(d)))
    }
}

/// Bloch angles `(θ, φ)` of the first column of a 2×2 basis.
fn bloch_angles(basis: &ComplexMatrix) -> (f64, f64) {
    let a = basis[(0, 0)];
    let b = basis[(1, 0)];
    // n = (2 Re(a* b), 2 Im(a* b), |a|² − |b|²)
    let ab = a.conj() * b;
    let nz = a.norm_sqr() - b.norm_sqr();
    let theta = math::acos(nz);
    let phi = math::atan2(2.0 * ab.im, 2.0 * ab.re);
    (theta, if phi < 0.0 { phi + 2.0 * math::PI } else { phi })
}

/// Qubit basis `{(I ± n̂·σ)/2}` with `n̂ = (sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn projective_qubit(theta: f64, phi: f64) -> ProjectiveMeasurement {
    let (c, s) = (math::cos(theta / 2.0), math::sin(theta / 2.0));
    let e = Complex64::new(math::cos(phi), math::sin(phi));
    let up = [Complex64::new(c, 0.0), e * s];
    let down = [Complex64::new(s, 0.0), -e * c];
    let basis = ComplexMatrix::from_fn(2, |i, k| if k == 0 { up[i] } else { down[i] });
    ProjectiveMeasurement::from_basis(basis, MeasurementParams::Bloch { theta, phi })
}

/// Basis `{U|i⟩⟨i|U†}`.
pub fn projective_from_unitary(u: &ComplexMatrix) -> Result<ProjectiveMeasurement> {
    u.ensure_unitary()?;
    Ok(ProjectiveMeasurement::from_basis(u.clone(), MeasurementParams::Basis))
}

/// Computational basis of dimension `d`.
pub fn computational(d: usize) -> ProjectiveMeasurement {
    if d == 2 {
        return projective_qubit(0.0, 0.0);
    }
    ProjectiveMeasurement::from_basis(ComplexMatrix::identity(d), MeasurementParams::Generator(alloc::vec![0.0; d * d]))
}

/// Hermitian `H` from `d²` reals: the first `d` fill the diagonal, then each
/// upper-triangular entry `(i, j)`, row by row, takes a `(re, im)` pair.
pub fn hermitian_from_params(params: &[f64], d: usize) -> Result<ComplexMatrix> {
    if params.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: params.len() });
    }
    let mut h = ComplexMatrix::zeros(d);
    for i in 0..d {
        h[(i, i)] = Complex64::new(params[i], 0.0);
    }
    let mut next = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = Complex64::new(params[next], params[next + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            next += 2;
        }
    }
    Ok(h)
}

/// Basis `exp(iH)|k⟩` with `H` from [`hermitian_from_params`].
pub fn projective_from_generator(params: &[f64], d: usize) -> Result<ProjectiveMeasurement> {
    let h = hermitian_from_params(params, d)?;
    let u = linalg::exp_i_hermitian(&h)?;
    Ok(ProjectiveMeasurement::from_basis(u, MeasurementParams::Generator(params.to_vec())))
}

/// Basis `V·exp(iH)|k⟩` for a fixed unitary `V`; used to rotate inside degenerate subspaces.
pub(crate) fn projective_from_rotated_generator(v: &ComplexMatrix, h: &ComplexMatrix) -> Result<ProjectiveMeasurement> {
    let u = v.matmul(&linalg::exp_i_hermitian(h)?);
    Ok(ProjectiveMeasurement::from_basis(u, MeasurementParams::Basis))
}

fn check_strength(x: f64) -> Result<()> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(Error::InvalidParameter { name: "x", value: x });
    }
    Ok(())
}

/// `τ = 2τ₁τ₂ = sech x`, evaluated as `2e^{−x}/(1 + e^{−2x})` so it never overflows;
/// it underflows to exactly zero beyond `x ≈ 745`.
pub fn tau(x: f64) -> Result<f64> {
    check_strength(x)?;
    let e = math::exp(-x);
    Ok(2.0 * e / (1.0 + e * e))
}

/// `1 − sech x = (1 − e^{−x})²/(1 + e^{−2x})`, accurate for small `x`.
pub fn one_minus_tau(x: f64) -> Result<f64> {
    check_strength(x)?;
    let e = math::exp(-x);
    let em1 = -libm::expm1(-x);
    Ok(em1 * em1 / (1.0 + e * e))
}

/// `(τ₁, τ₂)` for strength `x ≥ 0`.
pub fn tau_pair(x: f64) -> Result<(f64, f64)> {
    check_strength(x)?;
    let e = math::exp(-x);
    let n = math::sqrt(1.0 + e * e);
    Ok((e / n, 1.0 / n))
}

/// Projective basis, block split and strength defining `Ω±x`.
#[derive(Debug, Clone)]
pub struct WeakMeasurement {
    base: ProjectiveMeasurement,
    split: usize,
    x: f64,
    tau: f64,
    one_minus_tau: f64,
    blocks: [ComplexMatrix; 2],
}

impl WeakMeasurement {
    /// `split = k` puts the first `k` basis projectors into `Π¹`.
    pub fn new(base: ProjectiveMeasurement, split: usize, x: f64) -> Result<Self> {
        let d = base.dim();
        if split == 0 || split >= d {
            return Err(Error::InvalidParameter { name: "split", value: split as f64 });
        }
        if !(x > 0.0) || x.is_infinite() {
            return Err(Error::InvalidParameter { name: "x", value: x });
        }
        let mut p1 = ComplexMatrix::zeros(d);
        let mut p2 = ComplexMatrix::zeros(d);
        for (i, p) in base.projectors().iter().enumerate() {
            if i < split {
                p1 = &p1 + p;
            } else {
                p2 = &p2 + p;
            }
        }
        Ok(Self { tau: tau(x)?, one_minus_tau: one_minus_tau(x)?, base, split, x, blocks: [p1, p2] })
    }

    /// Qubit weak measurement with the default split `k = 1`.
    pub fn qubit(theta: f64, phi: f64, x: f64) -> Result<Self> {
        Self::new(projective_qubit(theta, phi), 1, x)
    }

    pub fn base(&self) -> &ProjectiveMeasurement {
        &self.base
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn strength(&self) -> f64 {
        self.x
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn one_minus_tau(&self) -> f64 {
        self.one_minus_tau
    }

    pub fn tau_pair(&self) -> (f64, f64) {
        tau_pair(self.x).expect("strength validated")
    }

    /// `[Π¹, Π²]`.
    pub fn blocks(&self) -> &[ComplexMatrix; 2] {
        &self.blocks
    }

    /// `[Ω_{+x}, Ω_{−x}]`.
    pub fn operators(&self) -> [ComplexMatrix; 2] {
        let (t1, t2) = self.tau_pair();
        let [p1, p2] = &self.blocks;
        [&p1.scale(t1) + &p2.scale(t2), &p1.scale(t2) + &p2.scale(t1)]
    }

    /// Same base and split at another strength.
    pub fn with_strength(&self, x: f64) -> Result<Self> {
        Self::new(self.base.clone(), self.split, x)
    }

    /// Two-outcome projective measurement `{Π¹, Π²}` that the weak family tends to as `x → ∞`.
    /// Equals the base measurement's channel when `d_a = 2`.
    pub fn apply_block_dephasing(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_local_dims(self.base.dim(), m)?;
        Ok(&conjugate_local(&self.blocks[0], m) + &conjugate_local(&self.blocks[1], m))
    }
}

fn check_local_dims(d_a: usize, m: &ComplexMatrix) -> Result<()> {
    if m.dim() == 0 || !m.dim().is_multiple_of(d_a) {
        return Err(Error::DimensionMismatch { expected: d_a, found: m.dim() });
    }
    Ok(())
}

/// `Π^a(M) = Σ_k (Π_k ⊗ I) M (Π_k ⊗ I)`.
pub fn apply_projective(pm: &ProjectiveMeasurement, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_local_dims(pm.dim(), m)?;
    let mut out = ComplexMatrix::zeros(m.dim());
    for p in pm.projectors() {
        out = &out + &conjugate_local(p, m);
    }
    Ok(out)
}

/// `Ω(M) = τ M + (1 − τ) B(M)` (convex form).
pub fn apply_weak(wm: &WeakMeasurement, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dephased = wm.apply_block_dephasing(m)?;
    Ok(&m.scale(wm.tau()) + &dephased.scale(wm.one_minus_tau()))
}

/// `Ω(M) = Σ_{k=±x} (Ω_k ⊗ I) M (Ω_k ⊗ I)` (operator-sum form).
pub fn apply_weak_kraus(wm: &WeakMeasurement, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_local_dims(wm.base().dim(), m)?;
    let [a, b] = wm.operators();
    Ok(&conjugate_local(&a, m) + &conjugate_local(&b, m))
}

/// Whether `‖Σ Πᵢ ρ_a Πᵢ − ρ_a‖_HS ≤ tol`.
pub fn is_locally_invariant(pm: &ProjectiveMeasurement, rho_a: &ComplexMatrix, tol: f64) -> bool {
    match apply_projective(pm, rho_a) {
        Ok(out) if rho_a.dim() == pm.dim() => linalg::hs_distance_sq(&out, rho_a).is_ok_and(|d| math::sqrt(d) <= tol),
        _ => false,
    }
}

/// Whether `‖Π^a(ρ) − ρ‖_HS ≤ tol`, i.e. `ρ` is partially incoherent for `pm`.
pub fn is_partially_incoherent(pm: &ProjectiveMeasurement, rho: &ComplexMatrix, tol: f64) -> bool {
    apply_projective(pm, rho).and_then(|out| linalg::hs_distance_sq(&out, rho)).is_ok_and(|d| math::sqrt(d) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, pauli};
    use crate::rng::SplitMix64;
    use crate::states::random_density;
    use core::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn qubit_examples() {
        let z = projective_qubit(0.0, 0.0);
        assert!(z.projectors()[0].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);
        assert!(z.projectors()[1].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-15);

        let x = projective_qubit(FRAC_PI_2, 0.0);
        let plus = &ComplexMatrix::identity(2).scale(0.5) + &pauli::x().scale(0.5);
        let minus = &ComplexMatrix::identity(2).scale(0.5) - &pauli::x().scale(0.5);
        assert!(x.projectors()[0].max_abs_diff(&plus) < 1e-15);
        assert!(x.projectors()[1].max_abs_diff(&minus) < 1e-15);
    }

    #[test]
    fn qubit_projectors_match_bloch_formula() {
        let mut g = SplitMix64::new(4);
        for _ in 0..50 {
            let (theta, phi) = (g.uniform(-10.0, 10.0), g.uniform(-10.0, 10.0));
            let pm = projective_qubit(theta, phi);
            let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let mut ns = ComplexMatrix::zeros(2);
            for (ni, s) in n.iter().zip(pauli::all()) {
                ns = &ns + &s.scale(*ni);
            }
            let i2 = ComplexMatrix::identity(2);
            assert!(pm.projectors()[0].max_abs_diff(&(&i2 + &ns).scale(0.5)) < 1e-14);
            assert!(pm.projectors()[1].max_abs_diff(&(&i2 - &ns).scale(0.5)) < 1e-14);
            assert!(pm.residual() < 1e-12);
        }
    }

    #[test]
    fn unitary_examples() {
        let id = projective_from_unitary(&ComplexMatrix::identity(3)).unwrap();
        assert!(id.projectors()[1].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.0])) < 1e-15);

        let h = (&pauli::x() + &pauli::z()).scale(core::f64::consts::FRAC_1_SQRT_2);
        let had = projective_from_unitary(&h).unwrap();
        let plus = &ComplexMatrix::identity(2).scale(0.5) + &pauli::x().scale(0.5);
        assert!(had.projectors()[0].max_abs_diff(&plus) < 1e-15);

        let mut g = SplitMix64::new(12);
        for d in 2..5 {
            let h = g.hermitian(d);
            let u = linalg::exp_i_hermitian(&h).unwrap();
            assert!(projective_from_unitary(&u).unwrap().residual() <= 1e-9);
        }
        let bad = ComplexMatrix::identity(2).scale(2.0);
        assert!(matches!(projective_from_unitary(&bad), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn from_projectors_validates() {
        let z = projective_qubit(0.0, 0.0);
        assert!(ProjectiveMeasurement::from_projectors(z.projectors().to_vec()).is_ok());
        let bad = alloc::vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(2)];
        assert!(ProjectiveMeasurement::from_projectors(bad).is_err());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(0.0).unwrap(), 1.0);
        let t50 = tau(50.0).unwrap();
        assert!(t50 < 1e-21 && t50 > 3.8e-22);
        assert!((tau(1.0).unwrap() - 1.0 / 1.0f64.cosh()).abs() < 1e-15);
        assert!((tau(1.0).unwrap() - 0.648_054_273_663_885_4).abs() < 1e-15);
        assert!(tau(-1.0).is_err());
        assert_eq!(tau(800.0).unwrap(), 0.0);
        let mut prev = 1.0;
        for i in 1..200 {
            let t = tau(i as f64 * 0.1).unwrap();
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn tau_pair_identities() {
        for x in [1e-6, 0.3, 1.0, 5.0, 50.0, 700.0] {
            let (t1, t2) = tau_pair(x).unwrap();
            assert!((t1 * t1 + t2 * t2 - 1.0).abs() < 1e-12);
            assert!((2.0 * t1 * t2 - tau(x).unwrap()).abs() < 1e-15);
            assert!((t1 - ((1.0 - x.tanh()) / 2.0).sqrt()).abs() < 1e-8);
            assert!((one_minus_tau(x).unwrap() - (1.0 - tau(x).unwrap())).abs() < 1e-15);
        }
    }

    #[test]
    fn weak_completeness() {
        let mut g = SplitMix64::new(2);
        for x in [1e-6, 1e-3, 0.5, 1.0, 10.0, 50.0] {
            for d in [2, 3] {
                let u = g.haar_unitary(d);
                let pm = projective_from_unitary(&u).unwrap();
                for split in 1..d {
                    let wm = WeakMeasurement::new(pm.clone(), split, x).unwrap();
                    let [a, b] = wm.operators();
                    let sum = &a.matmul(&a.adjoint()) + &b.matmul(&b.adjoint());
                    assert!(sum.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn weak_rejects_bad_arguments() {
        let pm = projective_qubit(0.0, 0.0);
        assert!(WeakMeasurement::new(pm.clone(), 0, 1.0).is_err());
        assert!(WeakMeasurement::new(pm.clone(), 2, 1.0).is_err());
        assert!(WeakMeasurement::new(pm.clone(), 1, 0.0).is_err());
        assert!(WeakMeasurement::new(pm, 1, -1.0).is_err());
    }

    #[test]
    fn projective_channel_examples() {
        let z = projective_qubit(0.0, 0.0);
        let block = kron(&ComplexMatrix::from_real_diagonal(&[0.3, 0.7]), &pauli::x());
        assert!(apply_projective(&z, &block).unwrap().max_abs_diff(&block) < 1e-15);

        let sx = kron(&pauli::x(), &ComplexMatrix::identity(2));
        assert!(apply_projective(&z, &sx).unwrap().max_abs_diff(&ComplexMatrix::zeros(4)) < 1e-15);

        let rho = random_density(2, 3, 6, 5).unwrap();
        let pm = projective_qubit(1.0, 2.0);
        let once = apply_projective(&pm, rho.matrix()).unwrap();
        let twice = apply_projective(&pm, &once).unwrap();
        assert!((once.trace() - rho.matrix().trace()).norm() < 1e-12);
        assert!(twice.max_abs_diff(&once) < 1e-12);
        assert!(once.hermitian_deviation() < 1e-15);
        assert!(apply_projective(&pm, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn weak_channel_limits() {
        let rho = random_density(2, 2, 4, 17).unwrap();
        let m = rho.matrix();
        let pm = projective_qubit(0.4, 1.3);

        let near_id = WeakMeasurement::new(pm.clone(), 1, 1e-8).unwrap();
        let out = apply_weak(&near_id, m).unwrap();
        assert!(out.max_abs_diff(m) <= 1e-15 * m.hs_norm().max(1.0));

        let strong = WeakMeasurement::new(pm.clone(), 1, 50.0).unwrap();
        let out = apply_weak(&strong, m).unwrap();
        assert!(out.max_abs_diff(&apply_projective(&pm, m).unwrap()) < 1e-20);
    }

    #[test]
    fn weak_convex_and_kraus_forms_agree() {
        let mut g = SplitMix64::new(31);
        for trial in 0..40u64 {
            let (da, db) = if trial % 2 == 0 { (2, 2) } else { (3, 2) };
            let rho = random_density(da, db, 1 + trial as usize % (da * db), trial).unwrap();
            let pm = projective_from_unitary(&g.haar_unitary(da)).unwrap();
            let wm = WeakMeasurement::new(pm, 1 + trial as usize % (da - 1), g.uniform(0.01, 6.0)).unwrap();
            let convex = apply_weak(&wm, rho.matrix()).unwrap();
            let kraus = apply_weak_kraus(&wm, rho.matrix()).unwrap();
            assert!(convex.max_abs_diff(&kraus) < 1e-10);
            assert!((convex.trace() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn projective_absorbs_weak_on_qubits() {
        let rho = random_density(2, 3, 3, 8).unwrap();
        let wm = WeakMeasurement::qubit(2.2, 0.3, 0.7).unwrap();
        let weak = apply_weak(&wm, rho.matrix()).unwrap();
        let a = apply_projective(wm.base(), &weak).unwrap();
        let b = apply_projective(wm.base(), rho.matrix()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn local_invariance_examples() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        let diag = ComplexMatrix::from_real_diagonal(&[0.7, 0.3]);
        assert!(is_locally_invariant(&projective_qubit(1.1, 0.2), &half, 1e-12));
        assert!(!is_locally_invariant(&projective_qubit(FRAC_PI_2, 0.0), &diag, 1e-6));
        assert!(is_locally_invariant(&projective_qubit(0.0, 0.0), &diag, 1e-12));
        assert!(is_locally_invariant(&projective_qubit(PI, 0.0), &diag, 1e-12));
    }

    #[test]
    fn transport_recovers_bloch_angles() {
        let pm = projective_qubit(0.0, 0.0);
        let target = projective_qubit(1.2, 2.5);
        let moved = pm.transported(target.basis()).unwrap();
        match moved.params() {
            MeasurementParams::Bloch { theta, phi } => {
                assert!((theta - 1.2).abs() < 1e-12);
                assert!((phi - 2.5).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generator_params_roundtrip() {
        let mut g = SplitMix64::new(40);
        let params: Vec<f64> = (0..9).map(|_| g.uniform(-1.0, 1.0)).collect();
        let h = hermitian_from_params(&params, 3).unwrap();
        assert!(h.hermitian_deviation() == 0.0);
        let pm = projective_from_generator(&params, 3).unwrap();
        assert!(pm.residual() < 1e-12);
        assert!(hermitian_from_params(&params, 2).is_err());
    }
}
