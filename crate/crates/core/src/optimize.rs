//! Derivative-free search over projective measurements on subsystem `a`.
//!
//! Qubits are parameterized by Bloch angles: a coarse `(θ, φ)` grid is
//! scanned and Nelder–Mead refines the best `refine_starts` grid points.
//! For `d_a > 2` each start is a fixed unitary `V` and the simplex moves in
//! `U = V·exp(iH)` with `H` from `d²` reals, beginning at `H = 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::math;
use crate::measurements::{
    computational, hermitian_from_params, projective_from_rotated_generator, projective_qubit, MeasurementParams,
    ProjectiveMeasurement,
};
use crate::rng::SplitMix64;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// Whether `a` is strictly better than `b`. NaN is never better.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Maximize => a > b || (b.is_nan() && !a.is_nan()),
            Direction::Minimize => a < b || (b.is_nan() && !a.is_nan()),
        }
    }

    fn sign(self) -> f64 {
        match self {
            Direction::Maximize => -1.0,
            Direction::Minimize => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationConfig {
    pub n_theta: usize,
    pub n_phi: usize,
    pub refine_starts: usize,
    /// Nelder–Mead stops once both the value spread and the simplex diameter are below this.
    pub tolerance: f64,
    pub max_evals: usize,
    pub direction: Direction,
    /// Random starting unitaries for `d_a > 2`, in addition to the identity.
    pub random_starts: usize,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        Self {
            n_theta: 32,
            n_phi: 64,
            refine_starts: 5,
            tolerance: 1e-8,
            max_evals: 10_000,
            direction: Direction::Maximize,
            random_starts: 16,
        }
    }
}

impl OptimizationConfig {
    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 8 {
            return Err(Error::InvalidParameter { name: "n_theta", value: self.n_theta as f64 });
        }
        if self.n_phi < 8 {
            return Err(Error::InvalidParameter { name: "n_phi", value: self.n_phi as f64 });
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter { name: "tolerance", value: self.tolerance });
        }
        if self.refine_starts == 0 {
            return Err(Error::InvalidParameter { name: "refine_starts", value: 0.0 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best_value: f64,
    pub best_measurement: ProjectiveMeasurement,
    pub evaluations: usize,
    pub converged: bool,
}

impl OptimizationResult {
    pub fn best_params(&self) -> &MeasurementParams {
        self.best_measurement.params()
    }
}

struct Tracker<'a> {
    objective: &'a mut dyn FnMut(&ProjectiveMeasurement) -> f64,
    direction: Direction,
    evaluations: usize,
    best: Option<(f64, ProjectiveMeasurement)>,
}

impl<'a> Tracker<'a> {
    fn eval(&mut self, pm: ProjectiveMeasurement) -> f64 {
        let v = (self.objective)(&pm);
        self.evaluations += 1;
        let better = match &self.best {
            None => true,
            Some((b, _)) => self.direction.better(v, *b),
        };
        if better {
            self.best = Some((v, pm));
        }
        v
    }

    fn finish(self, converged: bool) -> OptimizationResult {
        let (best_value, best_measurement) = self.best.expect("at least one evaluation");
        OptimizationResult { best_value, best_measurement, evaluations: self.evaluations, converged }
    }
}

/// Result of a Nelder–Mead run on a minimization problem.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead minimization with standard coefficients (1, 2, ½, ½).
/// NaN values rank last.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tolerance: f64,
    max_evals: usize,
) -> SimplexResult {
    let n = x0.len();
    let key = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        key(f(x))
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = (worst - best).abs();
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if spread <= tolerance && diameter <= tolerance {
            converged = true;
            break;
        }
        if evals >= max_evals {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along =
            |t: f64, worst: &[f64]| -> Vec<f64> { centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(1.0, &simplex[n].0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(2.0, &simplex[n].0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(0.5, &simplex[n].0);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-0.5, &simplex[n].0);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = entry.0.iter().zip(&x_best).map(|(a, b)| b + 0.5 * (a - b)).collect();
            let v = eval(&x, &mut evals);
            *entry = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    SimplexResult { x, value, evaluations: evals, converged }
}

/// Indices of the `k` best values, ties broken by lowest index.
fn top_indices(values: &[f64], k: usize, direction: Direction) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let s = direction.sign();
    idx.sort_by(|&a, &b| {
        let (va, vb) = (values[a], values[b]);
        let ka = if va.is_nan() { f64::INFINITY } else { s * va };
        let kb = if vb.is_nan() { f64::INFINITY } else { s * vb };
        ka.total_cmp(&kb)
    });
    idx.truncate(k);
    idx
}

/// Eigenvalue groups of `rho_a` (ascending) split at gaps `≥ 1e-8`.
fn degenerate_groups(eigenvalues: &[f64]) -> Vec<core::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        if i == eigenvalues.len() || eigenvalues[i] - eigenvalues[i - 1] >= tol::DEGENERACY_GAP {
            groups.push(start..i);
            start = i;
        }
    }
    groups
}

/// Optimizes `objective` over projective measurements on a `d_a`-dimensional system.
///
/// `restriction = Some(ρ_a)` limits the search to measurements leaving `ρ_a`
/// invariant. `hint` adds one extra refinement start.
pub fn optimize_measurement(
    objective: &mut dyn FnMut(&ProjectiveMeasurement) -> f64,
    d_a: usize,
    config: &OptimizationConfig,
    restriction: Option<&ComplexMatrix>,
    hint: Option<&ProjectiveMeasurement>,
) -> Result<OptimizationResult> {
    config.validate()?;
    if d_a < 2 {
        return Err(Error::InvalidParameter { name: "d_a", value: d_a as f64 });
    }
    if let Some(h) = hint {
        if h.dim() != d_a {
            return Err(Error::DimensionMismatch { expected: d_a, found: h.dim() });
        }
    }
    let mut tracker = Tracker { objective, direction: config.direction, evaluations: 0, best: None };

    if let Some(rho_a) = restriction {
        if rho_a.dim() != d_a {
            return Err(Error::DimensionMismatch { expected: d_a, found: rho_a.dim() });
        }
        let eig = linalg::hermitian_eig(rho_a)?;
        let groups = degenerate_groups(&eig.eigenvalues);
        if groups.len() == d_a {
            let pm = computational(d_a).transported(&eig.eigenvectors)?;
            tracker.eval(pm);
            return Ok(tracker.finish(true));
        }
        if groups.len() > 1 {
            let converged = refine_in_blocks(&mut tracker, &eig.eigenvectors, &groups, config);
            return Ok(tracker.finish(converged));
        }
        // One group: ρ_a ∝ I and every measurement is admissible.
    }

    let converged = if d_a == 2 {
        optimize_qubit(&mut tracker, config, hint)
    } else {
        optimize_unitary(&mut tracker, d_a, config, hint)
    };
    Ok(tracker.finish(converged))
}

fn bloch_of(pm: &ProjectiveMeasurement) -> (f64, f64) {
    match pm.params() {
        MeasurementParams::Bloch { theta, phi } => (*theta, *phi),
        _ => match computational(2).transported(pm.basis()).map(|m| m.params().clone()) {
            Ok(MeasurementParams::Bloch { theta, phi }) => (theta, phi),
            _ => (0.0, 0.0),
        },
    }
}

fn optimize_qubit(
    tracker: &mut Tracker<'_>,
    config: &OptimizationConfig,
    hint: Option<&ProjectiveMeasurement>,
) -> bool {
    let (nt, np) = (config.n_theta, config.n_phi);
    let angle = |i: usize, j: usize| (i as f64 * math::PI / (nt - 1) as f64, 2.0 * math::PI * j as f64 / np as f64);
    let mut values = Vec::with_capacity(nt * np);
    for i in 0..nt {
        for j in 0..np {
            let (t, p) = angle(i, j);
            values.push(tracker.eval(projective_qubit(t, p)));
        }
    }
    let mut starts: Vec<(f64, f64)> = top_indices(&values, config.refine_starts, config.direction)
        .into_iter()
        .map(|k| angle(k / np, k % np))
        .collect();
    if let Some(h) = hint {
        starts.push(bloch_of(h));
    }

    let step = math::PI / (nt - 1) as f64;
    let budget = config.max_evals.saturating_sub(tracker.evaluations) / starts.len();
    let sign = config.direction.sign();
    let mut converged = true;
    for (t, p) in starts {
        let res =
            nelder_mead(|x| sign * tracker.eval(projective_qubit(x[0], x[1])), &[t, p], step, config.tolerance, budget);
        converged &= res.converged;
    }
    converged
}

fn optimize_unitary(
    tracker: &mut Tracker<'_>,
    d: usize,
    config: &OptimizationConfig,
    hint: Option<&ProjectiveMeasurement>,
) -> bool {
    let mut rng = SplitMix64::new(0x5E_ED0F_57A7);
    let mut bases = vec![ComplexMatrix::identity(d)];
    bases.extend((0..config.random_starts).map(|_| rng.haar_unitary(d)));
    let zero = ComplexMatrix::zeros(d);
    let values: Vec<f64> = bases
        .iter()
        .map(|v| projective_from_rotated_generator(v, &zero).map_or(f64::NAN, |pm| tracker.eval(pm)))
        .collect();
    let mut starts: Vec<ComplexMatrix> =
        top_indices(&values, config.refine_starts, config.direction).into_iter().map(|k| bases[k].clone()).collect();
    if let Some(h) = hint {
        starts.push(h.basis().clone());
    }
    let budget = config.max_evals.saturating_sub(tracker.evaluations) / starts.len();
    let sign = config.direction.sign();
    let mut converged = true;
    for v in &starts {
        let res = nelder_mead(
            |x| {
                let h = hermitian_from_params(x, d).expect("parameter count matches");
                sign * projective_from_rotated_generator(v, &h).map_or(f64::NAN, |pm| tracker.eval(pm))
            },
            &vec![0.0; d * d],
            0.5,
            config.tolerance,
            budget,
        );
        converged &= res.converged;
    }
    converged
}

/// Rotations inside each degenerate eigenspace of `ρ_a`, starting from its eigenbasis `v`.
fn refine_in_blocks(
    tracker: &mut Tracker<'_>,
    v: &ComplexMatrix,
    groups: &[core::ops::Range<usize>],
    config: &OptimizationConfig,
) -> bool {
    let d = v.dim();
    let n_params: usize = groups.iter().map(|g| g.len() * g.len()).sum();
    let build = |x: &[f64]| -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(d);
        let mut offset = 0;
        for g in groups {
            let k = g.len();
            let block = hermitian_from_params(&x[offset..offset + k * k], k).expect("block size matches");
            for i in 0..k {
                for j in 0..k {
                    h[(g.start + i, g.start + j)] = block[(i, j)];
                }
            }
            offset += k * k;
        }
        h
    };
    let mut rng = SplitMix64::new(0xB10C_5EED);
    let mut starts = vec![vec![0.0; n_params]];
    starts.extend((0..config.refine_starts).map(|_| (0..n_params).map(|_| rng.uniform(-math::PI, math::PI)).collect()));
    let budget = config.max_evals / starts.len();
    let sign = config.direction.sign();
    let mut converged = true;
    for x0 in &starts {
        let res = nelder_mead(
            |x| sign * projective_from_rotated_generator(v, &build(x)).map_or(f64::NAN, |pm| tracker.eval(pm)),
            x0,
            0.5,
            config.tolerance,
            budget,
        );
        converged &= res.converged;
    }
    converged
}

/// Exhaustive qubit scan at `resolution_deg`: `θ = 0, r, …, ≤ 180°` and `φ = 0, r, … < 360°`.
pub fn dense_grid_oracle(
    objective: &mut dyn FnMut(&ProjectiveMeasurement) -> f64,
    resolution_deg: f64,
    direction: Direction,
) -> Result<OptimizationResult> {
    if !(resolution_deg > 0.0) || resolution_deg > 180.0 {
        return Err(Error::InvalidParameter { name: "resolution_deg", value: resolution_deg });
    }
    let n_theta = libm::floor(180.0 / resolution_deg + 1e-9) as usize + 1;
    let n_phi = libm::ceil(360.0 / resolution_deg - 1e-9) as usize;
    let mut tracker = Tracker { objective, direction, evaluations: 0, best: None };
    let rad = math::PI / 180.0;
    for i in 0..n_theta {
        for j in 0..n_phi {
            let (t, p) = (i as f64 * resolution_deg, j as f64 * resolution_deg);
            tracker.eval(projective_qubit(t * rad, p * rad));
        }
    }
    Ok(tracker.finish(true))
}
