//! Hellinger-distance coherence relative to projective and weak measurements.
//!
//! For a measurement `Π` on subsystem `a` the coherence is
//! `C(ρ|Π) = ‖√ρ − Π^a(√ρ)‖² = 1 − tr(√ρ Π^a(√ρ))`, which equals
//! `Σ_k I(ρ, Π_k ⊗ 1)` with `I` the Wigner–Yanase skew information.
//!
//! For a weak measurement the Hellinger form `‖√ρ − Ω(√ρ)‖²` scales as
//! `(1 − τ)²` times the coherence of the two-block measurement, while the
//! skew-information sum `Σ_{k=±x} I(ρ, Ω_k ⊗ 1)` scales as `(1 − τ)`. The two
//! are kept as separate functions; [`discrepancy_ratio`] reports their ratio.
//!
//! When `d_a > 2` the weak channel only dephases between the blocks `Π¹, Π²`,
//! so the `x → ∞` limit is [`coherence_block`], not the full projective value.

use crate::error::{Error, Result};
use crate::linalg::{self, conjugate_local, lift_a, ComplexMatrix, Subsystem};
use crate::measurements::{self, MeasurementParams, ProjectiveMeasurement, WeakMeasurement};
use crate::optimize::{optimize_measurement, Direction, OptimizationConfig};
use crate::states::DensityMatrix;
use crate::tol;

/// Which formula produced a [`CoherenceReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceMethod {
    HellingerDirect,
    SkewSum,
}

#[derive(Debug, Clone)]
pub struct CoherenceReport {
    pub value: f64,
    pub measurement: ProjectiveMeasurement,
    pub split: Option<usize>,
    pub x: Option<f64>,
    pub method: CoherenceMethod,
    /// False only when an optimizer ran out of evaluations or two
    /// independent evaluations of the same optimum disagreed.
    pub converged: bool,
}

impl CoherenceReport {
    pub fn measurement_params(&self) -> &MeasurementParams {
        self.measurement.params()
    }
}

/// Maps values in `[−1e-12, 0)` to zero.
pub(crate) fn clamp_small(v: f64) -> f64 {
    if (-tol::CLAMP..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

fn check_measurement_dim(rho: &DensityMatrix, d: usize) -> Result<()> {
    if rho.d_a() != d {
        return Err(Error::DimensionMismatch { expected: rho.d_a(), found: d });
    }
    Ok(())
}

/// `‖X − Π^a(X)‖²`; `pm` must match the leading dimension of `X`.
pub(crate) fn projective_value(sqrt: &ComplexMatrix, pm: &ProjectiveMeasurement) -> f64 {
    let mut dephased = ComplexMatrix::zeros(sqrt.dim());
    for p in pm.projectors() {
        dephased = &dephased + &conjugate_local(p, sqrt);
    }
    linalg::hs_norm_sq(&(sqrt - &dephased))
}

/// `‖X − B(X)‖²` with `B` the two-block dephasing of `wm`.
pub(crate) fn block_value(sqrt: &ComplexMatrix, wm: &WeakMeasurement) -> f64 {
    let [p1, p2] = wm.blocks();
    let dephased = &conjugate_local(p1, sqrt) + &conjugate_local(p2, sqrt);
    linalg::hs_norm_sq(&(sqrt - &dephased))
}

/// `‖X − Ω(X)‖²`.
pub(crate) fn weak_value(sqrt: &ComplexMatrix, wm: &WeakMeasurement) -> f64 {
    let out = measurements::apply_weak(wm, sqrt).expect("dimensions checked by caller");
    linalg::hs_norm_sq(&(sqrt - &out))
}

fn skew_from_sqrt(sqrt: &ComplexMatrix, k: &ComplexMatrix) -> f64 {
    let c = &sqrt.matmul(k) - &k.matmul(sqrt);
    0.5 * linalg::hs_norm_sq(&c)
}

/// `D_H(ρ, σ) = ‖√ρ − √σ‖² = 2(1 − tr √ρ√σ)`, in `[0, 2]`.
pub fn hellinger_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let d = linalg::hs_distance_sq(rho.sqrt(), sigma.sqrt())?;
    Ok(d.clamp(0.0, 2.0))
}

/// `I(ρ, K) = −½ tr([√ρ, K]²) = ½‖[√ρ, K]‖²`.
pub fn skew_information(rho: &DensityMatrix, k: &ComplexMatrix) -> Result<f64> {
    if k.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: k.dim() });
    }
    k.ensure_hermitian()?;
    Ok(skew_from_sqrt(rho.sqrt(), k))
}

/// `Σ_k I(ρ, Π_k ⊗ 1)`.
pub fn coherence_projective_skew(rho: &DensityMatrix, pm: &ProjectiveMeasurement) -> Result<CoherenceReport> {
    check_measurement_dim(rho, pm.dim())?;
    let value = pm.projectors().iter().map(|p| skew_from_sqrt(rho.sqrt(), &lift_a(p, rho.d_b()))).sum();
    Ok(CoherenceReport {
        value: clamp_small(value),
        measurement: pm.clone(),
        split: None,
        x: None,
        method: CoherenceMethod::SkewSum,
        converged: true,
    })
}

/// `C(ρ|Π) = ‖√ρ − Π^a(√ρ)‖²`, in `[0, 1]`.
pub fn coherence_projective(rho: &DensityMatrix, pm: &ProjectiveMeasurement) -> Result<CoherenceReport> {
    check_measurement_dim(rho, pm.dim())?;
    let value = projective_value(rho.sqrt(), pm);
    #[cfg(debug_assertions)]
    {
        let skew = coherence_projective_skew(rho, pm)?.value;
        debug_assert!((skew - value).abs() <= 1e-10, "skew sum {skew} vs Hellinger {value}");
    }
    Ok(CoherenceReport {
        value: clamp_small(value),
        measurement: pm.clone(),
        split: None,
        x: None,
        method: CoherenceMethod::HellingerDirect,
        converged: true,
    })
}

/// Coherence relative to the two-outcome measurement `{Π¹, Π²}`.
pub fn coherence_block(rho: &DensityMatrix, wm: &WeakMeasurement) -> Result<CoherenceReport> {
    check_measurement_dim(rho, wm.base().dim())?;
    Ok(CoherenceReport {
        value: clamp_small(block_value(rho.sqrt(), wm)),
        measurement: wm.base().clone(),
        split: Some(wm.split()),
        x: None,
        method: CoherenceMethod::HellingerDirect,
        converged: true,
    })
}

/// `C(ρ|Ω) = ‖√ρ − Ω(√ρ)‖²`.
pub fn coherence_weak(rho: &DensityMatrix, wm: &WeakMeasurement) -> Result<CoherenceReport> {
    check_measurement_dim(rho, wm.base().dim())?;
    Ok(CoherenceReport {
        value: clamp_small(weak_value(rho.sqrt(), wm)),
        measurement: wm.base().clone(),
        split: Some(wm.split()),
        x: Some(wm.strength()),
        method: CoherenceMethod::HellingerDirect,
        converged: true,
    })
}

/// `Σ_{k=±x} I(ρ, Ω_k ⊗ 1)`.
pub fn coherence_weak_skew(rho: &DensityMatrix, wm: &WeakMeasurement) -> Result<CoherenceReport> {
    check_measurement_dim(rho, wm.base().dim())?;
    let value = wm.operators().iter().map(|o| skew_from_sqrt(rho.sqrt(), &lift_a(o, rho.d_b()))).sum();
    Ok(CoherenceReport {
        value: clamp_small(value),
        measurement: wm.base().clone(),
        split: Some(wm.split()),
        x: Some(wm.strength()),
        method: CoherenceMethod::SkewSum,
        converged: true,
    })
}

/// `coherence_weak / coherence_weak_skew`, or `None` when the skew sum is at most `1e-12`.
/// Analytically this is `1 − sech x`.
pub fn discrepancy_ratio(rho: &DensityMatrix, wm: &WeakMeasurement) -> Result<Option<f64>> {
    let num = coherence_weak(rho, wm)?.value;
    let den = coherence_weak_skew(rho, wm)?.value;
    Ok((den > 1e-12).then(|| num / den))
}

/// `(1 − sech x)²`.
pub fn strength_ratio(x: f64) -> Result<f64> {
    let r = measurements::one_minus_tau(x)?;
    Ok(r * r)
}

/// H-MIN: the largest `C(ρ|Π)` over projective measurements on `a`.
///
/// With `restrict_locally_invariant` the search covers only measurements that
/// leave `ρ^a` unchanged: the eigenbasis of `ρ^a` with free rotations inside
/// degenerate eigenspaces.
pub fn hmin(
    rho: &DensityMatrix,
    restrict_locally_invariant: bool,
    config: &OptimizationConfig,
) -> Result<CoherenceReport> {
    let config = config.clone().with_direction(Direction::Maximize);
    let marginal = rho.marginal(Subsystem::A);
    let restriction = restrict_locally_invariant.then(|| marginal.matrix());
    let sqrt = rho.sqrt();
    let res = optimize_measurement(&mut |pm| projective_value(sqrt, pm), rho.d_a(), &config, restriction, None)?;
    Ok(CoherenceReport {
        value: clamp_small(res.best_value),
        measurement: res.best_measurement,
        split: None,
        x: None,
        method: CoherenceMethod::HellingerDirect,
        converged: res.converged,
    })
}

/// Maximum of `objective(pm, split)` over measurements and splits `1..d_a`.
/// Ties between splits go to the smallest split.
pub(crate) fn optimize_over_splits(
    d_a: usize,
    config: &OptimizationConfig,
    restriction: Option<&ComplexMatrix>,
    hint: Option<(&ProjectiveMeasurement, usize)>,
    objective: &mut dyn FnMut(&ProjectiveMeasurement, usize) -> f64,
) -> Result<(f64, ProjectiveMeasurement, usize, bool)> {
    let mut best: Option<(f64, ProjectiveMeasurement, usize, bool)> = None;
    for split in 1..d_a {
        let hint_pm = hint.filter(|(_, k)| *k == split).map(|(pm, _)| pm);
        let res = optimize_measurement(&mut |pm| objective(pm, split), d_a, config, restriction, hint_pm)?;
        let better = match &best {
            None => true,
            Some((v, ..)) => config.direction.better(res.best_value, *v),
        };
        if better {
            best = Some((res.best_value, res.best_measurement, split, res.converged));
        } else if let Some(b) = best.as_mut() {
            b.3 &= res.converged;
        }
    }
    best.ok_or(Error::InvalidParameter { name: "d_a", value: d_a as f64 })
}

/// Weak H-MIN at strength `x`, optimized directly over measurements and splits.
///
/// The result is also computed from the strength law, `(1 − sech x)²` times
/// the largest block coherence (the plain H-MIN when `d_a = 2`); if the two
/// differ by more than `1e-6` the report is marked unconverged.
pub fn hmin_weak(
    rho: &DensityMatrix,
    x: f64,
    restrict_locally_invariant: bool,
    config: &OptimizationConfig,
) -> Result<CoherenceReport> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::InvalidParameter { name: "x", value: x });
    }
    let config = config.clone().with_direction(Direction::Maximize);
    let marginal = rho.marginal(Subsystem::A);
    let restriction = restrict_locally_invariant.then(|| marginal.matrix());
    let sqrt = rho.sqrt();
    let (value, pm, split, mut converged) =
        optimize_over_splits(rho.d_a(), &config, restriction, None, &mut |pm, k| {
            WeakMeasurement::new(pm.clone(), k, x).map_or(f64::NAN, |wm| weak_value(sqrt, &wm))
        })?;

    let scaled = if rho.d_a() == 2 {
        strength_ratio(x)? * hmin(rho, restrict_locally_invariant, &config)?.value
    } else {
        let (block, ..) = optimize_over_splits(rho.d_a(), &config, restriction, None, &mut |pm, k| {
            WeakMeasurement::new(pm.clone(), k, x).map_or(f64::NAN, |wm| block_value(sqrt, &wm))
        })?;
        strength_ratio(x)? * block
    };
    converged &= (scaled - value).abs() <= 1e-6;

    Ok(CoherenceReport {
        value: clamp_small(value),
        measurement: pm,
        split: Some(split),
        x: Some(x),
        method: CoherenceMethod::HellingerDirect,
        converged,
    })
}
