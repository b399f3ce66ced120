//! Correlations induced by weak-measurement coherence.
//!
//! `Δ_w(ρ|Ω) = C(ρ|Ω) − C(ρ^a|Ω)` and `Q_w(ρ) = min_Ω Δ_w(ρ|Ω)`, with the
//! minimum taken over projective bases on `a` and, for `d_a > 2`, the block
//! split. Channels used in the monotonicity checks act on subsystem `b`.

use alloc::vec::Vec;

use crate::coherence::{optimize_over_splits, weak_value};
use crate::error::{Error, Result};
use crate::linalg::{self, lift_b, ComplexMatrix, Subsystem};
use crate::measurements::{MeasurementParams, ProjectiveMeasurement, WeakMeasurement};
use crate::optimize::{Direction, OptimizationConfig};
use crate::rng::SplitMix64;
use crate::states::DensityMatrix;
use crate::tol;

/// Square Kraus operators with `Σ A_k† A_k = I`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let d = operators.first().map_or(0, |a| a.dim());
        if d == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let mut sum = ComplexMatrix::zeros(d);
        for a in &operators {
            if a.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: a.dim() });
            }
            sum = &sum + &a.adjoint().matmul(a);
        }
        let residual = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if residual > tol::KRAUS || residual.is_nan() {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(Self { operators })
    }

    pub fn identity(d: usize) -> Self {
        Self { operators: alloc::vec![ComplexMatrix::identity(d)] }
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// `max |Σ A_k† A_k − I|`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        let sum = self.operators.iter().fold(ComplexMatrix::zeros(d), |s, a| &s + &a.adjoint().matmul(a));
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }
}

/// Random channel from a Haar unitary `U` on system ⊗ environment:
/// `A_k = (I ⊗ ⟨k|) U (I ⊗ |0⟩)`.
pub fn sample_cptp(dim: usize, dim_env: usize, seed: u64) -> Result<KrausChannel> {
    if dim == 0 || dim_env == 0 {
        return Err(Error::InvalidParameter { name: "dim", value: dim.min(dim_env) as f64 });
    }
    let u = SplitMix64::new(seed).haar_unitary(dim * dim_env);
    let operators =
        (0..dim_env).map(|k| ComplexMatrix::from_fn(dim, |i, j| u[(i * dim_env + k, j * dim_env)])).collect();
    KrausChannel::new(operators)
}

/// `Σ_k (I ⊗ A_k) ρ (I ⊗ A_k)†`.
pub fn apply_channel_b(rho: &DensityMatrix, ch: &KrausChannel) -> Result<DensityMatrix> {
    if ch.dim() != rho.d_b() {
        return Err(Error::DimensionMismatch { expected: rho.d_b(), found: ch.dim() });
    }
    let mut out = ComplexMatrix::zeros(rho.dim());
    for a in ch.operators() {
        let lifted = lift_b(rho.d_a(), a);
        out = &out + &lifted.matmul(rho.matrix()).matmul(&lifted.adjoint());
    }
    DensityMatrix::new(out.hermitian_part(), rho.d_a(), rho.d_b())
}

/// `Δ_w(ρ|Ω) = C(ρ|Ω) − C(ρ^a|Ω)`, both in the Hellinger form.
pub fn delta_w(rho: &DensityMatrix, wm: &WeakMeasurement) -> Result<f64> {
    if wm.base().dim() != rho.d_a() {
        return Err(Error::DimensionMismatch { expected: rho.d_a(), found: wm.base().dim() });
    }
    let marginal = rho.marginal(Subsystem::A);
    Ok(weak_value(rho.sqrt(), wm) - weak_value(marginal.sqrt(), wm))
}

#[derive(Debug, Clone)]
pub struct CorrelationReport {
    /// `Δ_w` at the minimizer, with values in `[−1e-9, 0)` mapped to zero.
    pub q_value: f64,
    pub minimizing_measurement: ProjectiveMeasurement,
    pub split: usize,
    pub delta_at_min: f64,
    pub converged: bool,
}

impl CorrelationReport {
    pub fn minimizing_params(&self) -> &MeasurementParams {
        self.minimizing_measurement.params()
    }
}

/// `Q_w(ρ)` at strength `x`.
pub fn q_w(rho: &DensityMatrix, x: f64, config: &OptimizationConfig) -> Result<CorrelationReport> {
    q_w_with_hint(rho, x, config, None)
}

/// [`q_w`] with an extra refinement start at `hint = (measurement, split)`.
pub fn q_w_with_hint(
    rho: &DensityMatrix,
    x: f64,
    config: &OptimizationConfig,
    hint: Option<(&ProjectiveMeasurement, usize)>,
) -> Result<CorrelationReport> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::InvalidParameter { name: "x", value: x });
    }
    let config = config.clone().with_direction(Direction::Minimize);
    let marginal = rho.marginal(Subsystem::A);
    let (sqrt, sqrt_a) = (rho.sqrt(), marginal.sqrt());
    let (delta, pm, split, converged) = optimize_over_splits(rho.d_a(), &config, None, hint, &mut |pm, k| {
        WeakMeasurement::new(pm.clone(), k, x).map_or(f64::NAN, |wm| weak_value(sqrt, &wm) - weak_value(sqrt_a, &wm))
    })?;
    let q_value = if (-1e-9..0.0).contains(&delta) { 0.0 } else { delta };
    Ok(CorrelationReport { q_value, minimizing_measurement: pm, split, delta_at_min: delta, converged })
}

#[derive(Debug, Clone)]
pub struct LocalUnitaryCheck {
    pub q_before: f64,
    pub q_after: f64,
    /// `|q_before − q_after|`.
    pub max_deviation: f64,
    /// `|Δ_w(ρ′|U_a Π U_a†) − Δ_w(ρ|Π)|` at the original minimizer `Π`.
    pub transported_deviation: f64,
}

/// Compares `Q_w` before and after `ρ ↦ (U_a ⊗ U_b) ρ (U_a ⊗ U_b)†`. The
/// minimizer transported by `U_a` seeds the second optimization.
pub fn local_unitary_invariance_check(
    rho: &DensityMatrix,
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
    x: f64,
    config: &OptimizationConfig,
) -> Result<LocalUnitaryCheck> {
    if u_a.dim() != rho.d_a() {
        return Err(Error::DimensionMismatch { expected: rho.d_a(), found: u_a.dim() });
    }
    if u_b.dim() != rho.d_b() {
        return Err(Error::DimensionMismatch { expected: rho.d_b(), found: u_b.dim() });
    }
    u_a.ensure_unitary()?;
    u_b.ensure_unitary()?;
    let before = q_w(rho, x, config)?;
    let rotated = rho.conjugate(&linalg::kron(u_a, u_b))?;
    let moved = before.minimizing_measurement.transported(u_a)?;
    let delta_moved = delta_w(&rotated, &WeakMeasurement::new(moved.clone(), before.split, x)?)?;
    let after = q_w_with_hint(&rotated, x, config, Some((&moved, before.split)))?;
    Ok(LocalUnitaryCheck {
        q_before: before.q_value,
        q_after: after.q_value,
        max_deviation: (before.q_value - after.q_value).abs(),
        transported_deviation: (delta_moved - before.delta_at_min).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{coherence_weak, strength_ratio};
    use crate::linalg::partial_trace;
    use crate::measurements::projective_qubit;
    use crate::states::{bell_diagonal, classical_correlated, product, random_density, BellDiagonalParams};

    #[test]
    fn sample_cptp_examples() {
        let ch = sample_cptp(3, 1, 5).unwrap();
        assert_eq!(ch.operators().len(), 1);
        assert!(ch.operators()[0].unitarity_residual() < 1e-12);
        for seed in 0..10 {
            assert!(sample_cptp(2, 4, seed).unwrap().completeness_residual() <= 1e-9);
        }
        let a = sample_cptp(2, 3, 99).unwrap();
        let b = sample_cptp(2, 3, 99).unwrap();
        for (x, y) in a.operators().iter().zip(b.operators()) {
            assert_eq!(x.as_slice(), y.as_slice());
        }
    }

    #[test]
    fn channel_on_b_examples() {
        let rho = random_density(2, 2, 4, 3).unwrap();
        let same = apply_channel_b(&rho, &KrausChannel::identity(2)).unwrap();
        assert!(same.matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let ch = sample_cptp(2, 8, 4).unwrap();
        let out = apply_channel_b(&rho, &ch).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        // The marginal on a is untouched by a channel on b.
        let a0 = partial_trace(rho.matrix(), 2, 2, Subsystem::A).unwrap();
        let a1 = partial_trace(out.matrix(), 2, 2, Subsystem::A).unwrap();
        assert!(a0.max_abs_diff(&a1) < 1e-12);
        assert!(apply_channel_b(&rho, &KrausChannel::identity(3)).is_err());
    }

    #[test]
    fn kraus_validation() {
        let bad = alloc::vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)];
        assert!(matches!(KrausChannel::new(bad), Err(Error::NotTracePreserving { .. })));
    }

    #[test]
    fn delta_examples() {
        let bell = bell_diagonal(BellDiagonalParams::new(0.2, -0.4, 0.5).unwrap()).unwrap();
        let wm = WeakMeasurement::qubit(0.9, 2.1, 1.3).unwrap();
        let d = delta_w(&bell, &wm).unwrap();
        assert!((d - coherence_weak(&bell, &wm).unwrap().value).abs() < 1e-12);

        let a = random_density(2, 1, 2, 1).unwrap();
        let b = random_density(3, 1, 3, 2).unwrap();
        let prod = product(&a, &b);
        for (t, p) in [(0.3, 0.0), (1.7, 4.0)] {
            let wm = WeakMeasurement::qubit(t, p, 2.0).unwrap();
            assert!(delta_w(&prod, &wm).unwrap().abs() < 1e-12);
        }

        for seed in 0..20 {
            let rho = random_density(2, 2, 1 + seed as usize % 4, seed).unwrap();
            let wm = WeakMeasurement::qubit(seed as f64, 0.5 * seed as f64, 1.0).unwrap();
            assert!(delta_w(&rho, &wm).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn q_w_examples() {
        let config = OptimizationConfig::default();
        let singlet = bell_diagonal(BellDiagonalParams::isotropic(1.0).unwrap()).unwrap();
        for x in [0.5, 2.0] {
            let r = q_w(&singlet, x, &config).unwrap();
            assert!((r.q_value - 0.5 * strength_ratio(x).unwrap()).abs() < 1e-8);
        }

        let z = ComplexMatrix::identity(2);
        let states = [random_density(2, 1, 2, 10).unwrap(), random_density(2, 1, 2, 11).unwrap()];
        let cc = classical_correlated(&[0.3, 0.7], &z, &states).unwrap();
        let r = q_w(&cc, 1.0, &config).unwrap();
        assert!(r.q_value.abs() < 1e-6);

        let prod = product(&random_density(2, 1, 2, 12).unwrap(), &random_density(2, 1, 2, 13).unwrap());
        assert!(q_w(&prod, 3.0, &config).unwrap().q_value.abs() < 1e-6);
    }

    #[test]
    fn local_unitary_examples() {
        let config = OptimizationConfig::default();
        let rho = random_density(2, 2, 3, 21).unwrap();
        let id = ComplexMatrix::identity(2);
        let r = local_unitary_invariance_check(&rho, &id, &id, 1.0, &config).unwrap();
        assert!(r.max_deviation < 1e-12);

        let mut g = SplitMix64::new(6);
        let (ua, ub) = (g.haar_unitary(2), g.haar_unitary(2));
        let r = local_unitary_invariance_check(&rho, &ua, &ub, 1.0, &config).unwrap();
        assert!(r.max_deviation <= 2e-6, "{r:?}");
        assert!(r.transported_deviation <= 1e-9, "{r:?}");
        assert!(local_unitary_invariance_check(&rho, &id.scale(2.0), &id, 1.0, &config).is_err());
    }

    #[test]
    fn minimizer_of_classical_state_is_incoherent() {
        let basis = projective_qubit(1.1, 0.4).basis().clone();
        let states = [random_density(2, 1, 2, 30).unwrap(), random_density(2, 1, 2, 31).unwrap()];
        let cc = classical_correlated(&[0.6, 0.4], &basis, &states).unwrap();
        let r = q_w(&cc, 2.0, &OptimizationConfig::default()).unwrap();
        let out = crate::measurements::apply_projective(&r.minimizing_measurement, cc.matrix()).unwrap();
        assert!(out.max_abs_diff(cc.matrix()) < 1e-6);
    }
}
