//! Single-state diagnostics for one measurement.

use serde::Serialize;
use weakcoh_core::coherence::{
    coherence_projective, coherence_weak, coherence_weak_skew, discrepancy_ratio, strength_ratio,
};
use weakcoh_core::correlation::delta_w;
use weakcoh_core::measurements::{
    computational, projective_from_generator, projective_qubit, MeasurementParams, ProjectiveMeasurement,
    WeakMeasurement,
};
use weakcoh_core::states::DensityMatrix;
use weakcoh_core::uncertainty::quantum_uncertainty_weak;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementChoice {
    /// Bloch angles; subsystem `a` must be a qubit.
    Bloch {
        theta: f64,
        phi: f64,
    },
    /// Eigenbasis of the Hermitian generator with these `d_a²` real parameters.
    Generator(Vec<f64>),
    Computational,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Diagnostics {
    pub d_a: usize,
    pub d_b: usize,
    pub measurement: MeasurementParams,
    pub split: usize,
    pub x: f64,
    pub strength_ratio: f64,
    pub coherence_projective: f64,
    pub coherence_weak: f64,
    pub coherence_weak_skew: f64,
    /// `coherence_weak / coherence_weak_skew`, absent when the denominator vanishes.
    pub discrepancy_ratio: Option<f64>,
    pub delta_w: f64,
    pub quantum_uncertainty_weak: f64,
}

fn measurement(choice: &MeasurementChoice, d_a: usize) -> Result<ProjectiveMeasurement> {
    match choice {
        MeasurementChoice::Bloch { theta, phi } => {
            if d_a != 2 {
                return Err(CliError::Usage(format!(
                    "--theta/--phi describe a qubit measurement but d_a = {d_a}; use --generator"
                )));
            }
            if !theta.is_finite() || !phi.is_finite() {
                return Err(CliError::Usage("--theta and --phi must be finite".into()));
            }
            Ok(projective_qubit(*theta, *phi))
        }
        MeasurementChoice::Generator(params) => Ok(projective_from_generator(params, d_a)?),
        MeasurementChoice::Computational => Ok(computational(d_a)),
    }
}

pub fn diagnose(rho: &DensityMatrix, choice: &MeasurementChoice, split: usize, x: f64) -> Result<Diagnostics> {
    let pm = measurement(choice, rho.d_a())?;
    if split == 0 || split >= rho.d_a() {
        return Err(CliError::Usage(format!("--split must lie in 1..{}, got {split}", rho.d_a())));
    }
    let wm = WeakMeasurement::new(pm, split, x)?;
    Ok(Diagnostics {
        d_a: rho.d_a(),
        d_b: rho.d_b(),
        measurement: wm.base().params().clone(),
        split,
        x,
        strength_ratio: strength_ratio(x)?,
        coherence_projective: coherence_projective(rho, wm.base())?.value,
        coherence_weak: coherence_weak(rho, &wm)?.value,
        coherence_weak_skew: coherence_weak_skew(rho, &wm)?.value,
        discrepancy_ratio: discrepancy_ratio(rho, &wm)?,
        delta_w: delta_w(rho, &wm)?,
        quantum_uncertainty_weak: quantum_uncertainty_weak(rho, &wm)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use weakcoh_core::states::{bell_diagonal, BellDiagonalParams};

    #[test]
    fn singlet_at_x2() {
        let rho = bell_diagonal(BellDiagonalParams::isotropic(1.0).unwrap()).unwrap();
        let r = diagnose(&rho, &MeasurementChoice::Bloch { theta: 0.7, phi: 2.1 }, 1, 2.0).unwrap();
        let sech = 1.0 / 2f64.cosh();
        assert!((r.coherence_weak - 0.5 * (1.0 - sech).powi(2)).abs() < 1e-12);
        assert!((r.coherence_projective - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let rho = bell_diagonal(BellDiagonalParams::isotropic(0.5).unwrap()).unwrap();
        assert!(diagnose(&rho, &MeasurementChoice::Computational, 2, 1.0).is_err());
        assert!(diagnose(&rho, &MeasurementChoice::Computational, 1, 0.0).is_err());
        assert!(diagnose(&rho, &MeasurementChoice::Generator(vec![1.0; 3]), 1, 1.0).is_err());
    }
}
