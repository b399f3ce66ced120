//! Coherence sweeps over the Bell-diagonal (`c₁ = c₂ = c₃ = −c`) and Werner families.

use std::fmt::Write as _;

use rayon::prelude::*;
use weakcoh_core::coherence::{coherence_projective, coherence_weak};
use weakcoh_core::measurements::{computational, projective_from_unitary, ProjectiveMeasurement, WeakMeasurement};
use weakcoh_core::rng::SplitMix64;
use weakcoh_core::states::{bell_diagonal, werner, BellDiagonalParams, DensityMatrix, WernerParams};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Bell,
    Werner,
}

impl Family {
    pub fn parameter_name(self) -> &'static str {
        match self {
            Family::Bell => "c",
            Family::Werner => "y",
        }
    }

    /// Physical parameter interval.
    pub fn domain(self) -> (f64, f64) {
        match self {
            Family::Bell => (-1.0 / 3.0, 1.0),
            Family::Werner => (-1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
    pub x_values: Vec<f64>,
    pub werner_d: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(CliError::Usage(format!("--range needs at least 2 samples, got {}", self.samples)));
        }
        let (lo, hi) = self.family.domain();
        let slack = 1e-12;
        if !(self.min <= self.max) || self.min < lo - slack || self.max > hi + slack {
            return Err(CliError::Usage(format!(
                "range [{}, {}] is outside the physical region [{lo}, {hi}] of the {:?} family",
                self.min, self.max, self.family
            )));
        }
        if let Some(x) = self.x_values.iter().find(|x| !(**x > 0.0) || x.is_infinite()) {
            return Err(CliError::Usage(format!("strength x must be positive and finite, got {x}")));
        }
        if self.family == Family::Werner && self.werner_d < 2 {
            return Err(CliError::Usage(format!("--d must be at least 2, got {}", self.werner_d)));
        }
        Ok(())
    }

    /// Evenly spaced parameters; the last one is exactly `max`.
    pub fn parameters(&self) -> Vec<f64> {
        let n = self.samples;
        (0..n)
            .map(|i| if i + 1 == n { self.max } else { self.min + (self.max - self.min) * i as f64 / (n - 1) as f64 })
            .collect()
    }

    fn state(&self, p: f64) -> Result<DensityMatrix> {
        Ok(match self.family {
            Family::Bell => bell_diagonal(BellDiagonalParams::isotropic(p.clamp(-1.0 / 3.0, 1.0))?)?,
            Family::Werner => werner(WernerParams::new(self.werner_d, p.clamp(-1.0, 1.0))?)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureRow {
    pub parameter: f64,
    /// One value per entry of `x_values`.
    pub weak: Vec<f64>,
    pub projective: f64,
}

/// Bases used to confirm that a row does not depend on the measurement direction.
fn probe_bases(d: usize) -> Vec<ProjectiveMeasurement> {
    let mut g = SplitMix64::new(0xF16E_0001);
    (0..3).map(|_| projective_from_unitary(&g.haar_unitary(d)).expect("Haar sample is unitary")).collect()
}

fn weak_value(rho: &DensityMatrix, pm: &ProjectiveMeasurement, x: f64) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for split in 1..pm.dim() {
        best = best.max(coherence_weak(rho, &WeakMeasurement::new(pm.clone(), split, x)?)?.value);
    }
    Ok(best)
}

/// Both families are invariant under `U ⊗ U`, so any basis is optimal. Rows are
/// evaluated in the computational basis and cross-checked against random bases.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<FigureRow>> {
    spec.validate()?;
    let d = match spec.family {
        Family::Bell => 2,
        Family::Werner => spec.werner_d,
    };
    let base = computational(d);
    let probes = probe_bases(d);
    spec.parameters()
        .into_par_iter()
        .map(|p| {
            let rho = spec.state(p)?;
            let projective = coherence_projective(&rho, &base)?.value;
            let weak = spec.x_values.iter().map(|&x| weak_value(&rho, &base, x)).collect::<Result<Vec<_>>>()?;
            for probe in &probes {
                let other = coherence_projective(&rho, probe)?.value;
                let other_weak = match spec.x_values.first() {
                    Some(&x) => (weak_value(&rho, probe, x)? - weak[0]).abs(),
                    None => 0.0,
                };
                if (other - projective).abs() > 1e-10 || other_weak > 1e-10 {
                    return Err(CliError::Sweep(format!(
                        "coherence at {}={p} depends on the measurement direction ({projective} vs {other})",
                        spec.family.parameter_name()
                    )));
                }
            }
            Ok(FigureRow { parameter: p, weak, projective })
        })
        .collect()
}

/// 12 significant digits in scientific notation.
pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn to_csv(spec: &SweepSpec, rows: &[FigureRow]) -> String {
    let mut out = String::from(spec.family.parameter_name());
    for x in &spec.x_values {
        write!(out, ",x={x}").unwrap();
    }
    out.push_str(",projective\n");
    for row in rows {
        out.push_str(&format_value(row.parameter));
        for v in &row.weak {
            out.push(',');
            out.push_str(&format_value(*v));
        }
        out.push(',');
        out.push_str(&format_value(row.projective));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, min: f64, max: f64, samples: usize) -> SweepSpec {
        SweepSpec { family, min, max, samples, x_values: vec![1.0, 2.0, 3.0, 50.0], werner_d: 2 }
    }

    #[test]
    fn rejects_unphysical_ranges() {
        assert!(sweep(&spec(Family::Bell, -0.5, 1.0, 10)).is_err());
        assert!(sweep(&spec(Family::Werner, -1.0, 1.5, 10)).is_err());
        assert!(sweep(&spec(Family::Werner, -1.0, 1.0, 1)).is_err());
    }

    #[test]
    fn csv_layout() {
        let s = spec(Family::Bell, 0.0, 1.0, 2);
        let rows = sweep(&s).unwrap();
        let csv = to_csv(&s, &rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "c,x=1,x=2,x=3,x=50,projective");
        let zero: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(zero.len(), 6);
        assert!(zero.iter().all(|v| v.abs() < 1e-30));
        assert!(lines.next().unwrap().starts_with("1.00000000000e0,"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn qutrit_werner_runs() {
        let mut s = spec(Family::Werner, -1.0, 1.0, 7);
        s.werner_d = 3;
        let rows = sweep(&s).unwrap();
        // y = 1/3 is the maximally mixed state for d = 3.
        let mixed = sweep(&SweepSpec { min: 1.0 / 3.0, max: 1.0 / 3.0, samples: 2, ..s.clone() }).unwrap();
        assert!(mixed.iter().all(|r| r.projective < 1e-10 && r.weak.iter().all(|w| *w < 1e-10)));
        assert!(rows.iter().all(|r| r.weak.iter().all(|w| *w <= r.projective + 1e-12)));
    }
}
