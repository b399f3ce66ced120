//! Seeded sampling built on splitmix64.
//!
//! Every random quantity in the crate is drawn from a [`SplitMix64`] stream.
//! Per-trial seeds are derived with [`mix`], which is the `(index + 1)`-th
//! output of a splitmix64 stream started at `seed`, so any implementation of
//! splitmix64 reproduces the same trial seeds.

use alloc::vec::Vec;

use crate::linalg::ComplexMatrix;
use crate::math;
use crate::Complex64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed for sub-stream `index` of `seed`.
#[inline]
pub fn mix(seed: u64, index: u64) -> u64 {
    finalize(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// The splitmix64 generator (Steele, Lea & Flood).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        finalize(self.state)
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as usize
    }

    /// Standard normal pair by Box–Muller.
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        let r = math::sqrt(-2.0 * math::ln(u1));
        let t = 2.0 * math::PI * u2;
        (r * math::cos(t), r * math::sin(t))
    }

    /// Circularly symmetric complex normal with `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let (a, b) = self.gaussian_pair();
        Complex64::new(a, b) * core::f64::consts::FRAC_1_SQRT_2
    }

    /// Bloch angles of a direction uniform on the unit sphere.
    pub fn sphere_angles(&mut self) -> (f64, f64) {
        let theta = math::acos(1.0 - 2.0 * self.next_f64());
        let phi = 2.0 * math::PI * self.next_f64();
        (theta, phi)
    }

    /// Haar-distributed unitary of dimension `d`.
    pub fn haar_unitary(&mut self, d: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(d, |_, _| self.complex_gaussian());
        orthonormalize_columns(&g)
    }

    /// Random Hermitian matrix `(G + G†)/2` with complex Gaussian `G`.
    pub fn hermitian(&mut self, d: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(d, |_, _| self.complex_gaussian());
        g.hermitian_part()
    }

    /// Random unit ket of dimension `d`.
    pub fn ket(&mut self, d: usize) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = (0..d).map(|_| self.complex_gaussian()).collect();
        let n = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        for z in &mut v {
            *z /= n;
        }
        v
    }

    /// Probability vector of length `n`, uniform on the simplex.
    pub fn simplex(&mut self, n: usize) -> Vec<f64> {
        let mut w: Vec<f64> = (0..n).map(|_| -math::ln(1.0 - self.next_f64())).collect();
        let s: f64 = w.iter().sum();
        for p in &mut w {
            *p /= s;
        }
        w
    }
}

/// Modified Gram–Schmidt, applied twice. With a Gaussian input the result is
/// Haar distributed since the implied `R` has a positive real diagonal.
fn orthonormalize_columns(g: &ComplexMatrix) -> ComplexMatrix {
    let d = g.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..d).map(|j| (0..d).map(|i| g[(i, j)]).collect()).collect();
    for _pass in 0..2 {
        for j in 0..d {
            for k in 0..j {
                let proj: Complex64 = (0..d).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (z, c) in rest[0].iter_mut().zip(&done[k]) {
                    *z -= proj * c;
                }
            }
            let n = math::sqrt(cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>());
            for z in &mut cols[j] {
                *z /= n;
            }
        }
    }
    ComplexMatrix::from_fn(d, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_outputs() {
        // First outputs of splitmix64 seeded with 0 (reference implementation).
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(g.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(g.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn mix_is_the_stream_output() {
        let mut g = SplitMix64::new(42);
        for i in 0..5 {
            assert_eq!(mix(42, i), g.next_u64());
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut g = SplitMix64::new(7);
        for d in 1..6 {
            let u = g.haar_unitary(d);
            let r = u.adjoint().matmul(&u).max_abs_diff(&ComplexMatrix::identity(d));
            assert!(r < 1e-13, "d = {d}, residual {r}");
        }
    }

    #[test]
    fn simplex_sums_to_one() {
        let mut g = SplitMix64::new(3);
        let p = g.simplex(5);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(p.iter().all(|&x| x >= 0.0));
    }
}
