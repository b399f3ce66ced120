//! Variance decomposition, weak-measurement uncertainty and weak values.
//!
//! The variance `V(ρ, A)` splits into a quantum part, the skew information
//! `I(ρ, A)`, and a classical part `tr(√ρ A √ρ A) − tr(ρA)²`.

use alloc::vec::Vec;

use crate::coherence::{coherence_weak_skew, hellinger_distance, skew_information};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::measurements::WeakMeasurement;
use crate::states::DensityMatrix;
use crate::tol;
use crate::Complex64;

fn check_observable(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<()> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: a.dim() });
    }
    a.ensure_hermitian()
}

/// `A − tr(ρA)·I`.
fn centered(rho: &DensityMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    let mean = linalg::trace_product_re(rho.matrix(), a);
    a - &ComplexMatrix::identity(a.dim()).scale(mean)
}

/// `V(ρ, A) = tr(ρ A₀²)` with `A₀ = A − tr(ρA)`.
pub fn variance(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<f64> {
    check_observable(rho, a)?;
    let a0 = centered(rho, a);
    Ok(linalg::trace_product_re(rho.matrix(), &a0.matmul(&a0)).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyBreakdown {
    pub total: f64,
    pub quantum: f64,
    pub classical: f64,
}

/// `total = V(ρ, A)`, `quantum = I(ρ, A)`, `classical = tr(√ρ A₀ √ρ A₀)`.
pub fn uncertainty_breakdown(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<UncertaintyBreakdown> {
    let total = variance(rho, a)?;
    let quantum = skew_information(rho, a)?;
    let a0 = centered(rho, a);
    let s = rho.sqrt();
    let classical = linalg::trace_product_re(&s.matmul(&a0), &s.matmul(&a0));
    Ok(UncertaintyBreakdown { total, quantum, classical })
}

/// `Σ_{k=±x} I(ρ, Ω_k ⊗ 1)`.
pub fn quantum_uncertainty_weak(rho: &DensityMatrix, wm: &WeakMeasurement) -> Result<f64> {
    Ok(coherence_weak_skew(rho, wm)?.value)
}

/// `Σ_k I(ρ, K_k)` for an arbitrary list of Hermitian operators.
pub fn quantum_uncertainty(rho: &DensityMatrix, operators: &[ComplexMatrix]) -> Result<f64> {
    operators.iter().map(|k| skew_information(rho, k)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyBoundCheck {
    pub hellinger: f64,
    pub lhs: f64,
    pub rhs_sqrt_commutator: f64,
    pub rhs_plain_commutator: f64,
    pub holds_sqrt: bool,
    pub holds_plain: bool,
}

impl UncertaintyBoundCheck {
    pub fn margin_sqrt(&self) -> f64 {
        self.lhs - self.rhs_sqrt_commutator
    }

    pub fn margin_plain(&self) -> f64 {
        self.lhs - self.rhs_plain_commutator
    }
}

/// Evaluates `I(ρ,K)·I(σ,K) ≥ 4|tr([A,B]K)|⁴ / (H² − 4H)²` with `H = D_H(ρ, σ)`,
/// for `(A, B) = (√ρ, √σ)` and `(A, B) = (ρ, σ)`. Hold flags allow `1e-12` slack.
pub fn uncertainty_bound_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    k: &ComplexMatrix,
) -> Result<UncertaintyBoundCheck> {
    let h = hellinger_distance(rho, sigma)?;
    if h <= 1e-12 {
        return Err(Error::DegenerateDenominator { distance: h });
    }
    let lhs = skew_information(rho, k)? * skew_information(sigma, k)?;
    let denom = (h * h - 4.0 * h) * (h * h - 4.0 * h);
    let rhs = |a: &ComplexMatrix, b: &ComplexMatrix| -> Result<f64> {
        let c = linalg::commutator(a, b)?;
        let t = linalg::trace_product(&c, k)?.norm();
        Ok(4.0 * t * t * t * t / denom)
    };
    let rhs_sqrt = rhs(rho.sqrt(), sigma.sqrt())?;
    let rhs_plain = rhs(rho.matrix(), sigma.matrix())?;
    Ok(UncertaintyBoundCheck {
        hellinger: h,
        lhs,
        rhs_sqrt_commutator: rhs_sqrt,
        rhs_plain_commutator: rhs_plain,
        holds_sqrt: lhs + 1e-12 >= rhs_sqrt,
        holds_plain: lhs + 1e-12 >= rhs_plain,
    })
}

/// Pre-selected `|ψ⟩`, post-selected `|φ⟩` and an observable `O`.
#[derive(Debug, Clone)]
pub struct WeakValueContext {
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    observable: ComplexMatrix,
    overlap: Complex64,
}

impl WeakValueContext {
    pub fn new(pre: Vec<Complex64>, post: Vec<Complex64>, observable: ComplexMatrix) -> Result<Self> {
        let d = observable.dim();
        for (what, v) in [("pre_state", &pre), ("post_state", &post)] {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: v.len() });
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if (norm - 1.0).abs() > tol::NORMALIZATION {
                return Err(Error::NotNormalized { what, norm });
            }
        }
        observable.ensure_hermitian()?;
        let overlap = inner(&post, &pre);
        Ok(Self { pre, post, observable, overlap })
    }

    /// `⟨φ|ψ⟩`.
    pub fn overlap(&self) -> Complex64 {
        self.overlap
    }

    /// `α = |⟨φ|ψ⟩|²`.
    pub fn alpha(&self) -> f64 {
        self.overlap.norm_sqr()
    }

    fn check_alpha(&self) -> Result<()> {
        let alpha = self.alpha();
        if alpha < tol::POSTSELECTION {
            return Err(Error::OrthogonalPostselection { overlap: alpha });
        }
        Ok(())
    }

    fn weak(&self, m: &ComplexMatrix) -> Complex64 {
        inner(&self.post, &m.apply(&self.pre)) / self.overlap
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `⟨φ|O|ψ⟩ / ⟨φ|ψ⟩`.
pub fn weak_value(ctx: &WeakValueContext) -> Result<Complex64> {
    ctx.check_alpha()?;
    Ok(ctx.weak(&ctx.observable))
}

/// `⟨O²⟩_w / α − ⟨O⟩_w²`; generally complex.
pub fn weak_variance(ctx: &WeakValueContext) -> Result<Complex64> {
    ctx.check_alpha()?;
    let w = ctx.weak(&ctx.observable);
    let w2 = ctx.weak(&ctx.observable.matmul(&ctx.observable));
    Ok(w2 / ctx.alpha() - w * w)
}
