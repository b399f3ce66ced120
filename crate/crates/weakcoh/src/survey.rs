//! Survey of the Hellinger/commutator uncertainty bound, in both its
//! `[√ρ, K]` and `[ρ, K]` forms.

use rayon::prelude::*;
use serde::Serialize;
use weakcoh_core::linalg::ComplexMatrix;
use weakcoh_core::rng::{mix, SplitMix64};
use weakcoh_core::states::{random_density, DensityMatrix};
use weakcoh_core::uncertainty::{uncertainty_bound_check, UncertaintyBoundCheck};
use weakcoh_core::Complex64;

use crate::error::{CliError, Result};

pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stream {
    /// Independent random `ρ`, `σ` and `K`.
    Generic,
    /// `ρ`, `σ` and `K` diagonal in one shared random basis.
    Commuting,
}

#[derive(Debug, Clone)]
pub struct SurveySpec {
    pub trials: usize,
    pub seed: u64,
    pub stream: Stream,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VariantSummary {
    pub holds: usize,
    pub hold_rate: f64,
    /// Smallest `(lhs − rhs)/(lhs + rhs)` seen, with its trial seed.
    pub worst_margin: f64,
    pub worst_seed: Option<u64>,
    /// Counts of the relative margin over `HISTOGRAM_BINS` equal bins on `[−1, 1]`.
    pub histogram: Vec<usize>,
    pub violating_seeds: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SurveyReport {
    pub seed: u64,
    pub trials: usize,
    pub stream: Stream,
    pub dim: usize,
    pub evaluated: usize,
    /// Trials whose Hellinger distance was too small to divide by.
    pub skipped: usize,
    pub sqrt_commutator: VariantSummary,
    pub plain_commutator: VariantSummary,
}

fn diagonal_in(u: &ComplexMatrix, diag: &[f64]) -> ComplexMatrix {
    let d = diag.len();
    let mut m = ComplexMatrix::zeros(d);
    for (i, v) in diag.iter().enumerate() {
        m[(i, i)] = Complex64::new(*v, 0.0);
    }
    u.matmul(&m).matmul(&u.adjoint())
}

fn sample(stream: Stream, dim: usize, seed: u64) -> Result<(DensityMatrix, DensityMatrix, ComplexMatrix)> {
    let mut g = SplitMix64::new(seed);
    Ok(match stream {
        Stream::Generic => {
            let r1 = g.range_inclusive(1, dim);
            let rho = random_density(dim, 1, r1, g.next_u64())?;
            let r2 = g.range_inclusive(1, dim);
            let sigma = random_density(dim, 1, r2, g.next_u64())?;
            (rho, sigma, g.hermitian(dim))
        }
        Stream::Commuting => {
            let u = g.haar_unitary(dim);
            let p = g.simplex(dim);
            let q = g.simplex(dim);
            let k: Vec<f64> = (0..dim).map(|_| g.gaussian_pair().0).collect();
            (
                DensityMatrix::single(diagonal_in(&u, &p))?,
                DensityMatrix::single(diagonal_in(&u, &q))?,
                diagonal_in(&u, &k),
            )
        }
    })
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    let s = lhs + rhs;
    if s > 0.0 {
        (lhs - rhs) / s
    } else {
        0.0
    }
}

fn summarize(
    results: &[(u64, UncertaintyBoundCheck)],
    pick: impl Fn(&UncertaintyBoundCheck) -> (f64, bool),
) -> VariantSummary {
    let mut histogram = vec![0; HISTOGRAM_BINS];
    let mut worst = (f64::INFINITY, None);
    let mut violating_seeds = Vec::new();
    let mut holds = 0;
    for (seed, r) in results {
        let (rhs, ok) = pick(r);
        let m = relative(r.lhs, rhs);
        let bin = (((m + 1.0) / 2.0 * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
        histogram[bin] += 1;
        if m < worst.0 {
            worst = (m, Some(*seed));
        }
        if ok {
            holds += 1;
        } else {
            violating_seeds.push(*seed);
        }
    }
    let n = results.len();
    VariantSummary {
        holds,
        hold_rate: if n > 0 { holds as f64 / n as f64 } else { 0.0 },
        worst_margin: if n > 0 { worst.0 } else { 0.0 },
        worst_seed: worst.1,
        histogram,
        violating_seeds,
    }
}

pub fn run(spec: &SurveySpec) -> Result<SurveyReport> {
    if spec.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if spec.dim < 2 {
        return Err(CliError::Usage(format!("--d must be at least 2, got {}", spec.dim)));
    }
    let outcomes = (0..spec.trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = mix(spec.seed, t);
            let (rho, sigma, k) = sample(spec.stream, spec.dim, seed)?;
            match uncertainty_bound_check(&rho, &sigma, &k) {
                Ok(r) => Ok(Some((seed, r))),
                Err(weakcoh_core::Error::DegenerateDenominator { .. }) => Ok(None),
                Err(e) => Err(e.into()),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<_> = outcomes.iter().flatten().cloned().collect();
    Ok(SurveyReport {
        seed: spec.seed,
        trials: spec.trials,
        stream: spec.stream,
        dim: spec.dim,
        evaluated: results.len(),
        skipped: spec.trials - results.len(),
        sqrt_commutator: summarize(&results, |r| (r.rhs_sqrt_commutator, r.holds_sqrt)),
        plain_commutator: summarize(&results, |r| (r.rhs_plain_commutator, r.holds_plain)),
    })
}
