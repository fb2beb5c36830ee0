//! Monte Carlo estimate of a component from uniformly random rotations.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::IndexTuple;
use crate::error::{Error, Result};
use crate::oracle::rotation::RotationSample;

pub const MIN_SAMPLES: usize = 100;

/// Haar-uniform rotation from three uniform variates (Shoemake's method).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> RotationSample {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let u3: f64 = rng.random();
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (s2, c2) = (TAU * u2).sin_cos();
    let (s3, c3) = (TAU * u3).sin_cos();
    RotationSample::from_quaternion(b * c3, a * s2, a * c2, b * s3)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

pub fn mc_component(n: usize, lab: &IndexTuple, mol: &IndexTuple, samples: usize, seed: u64) -> Result<McEstimate> {
    for t in [lab, mol] {
        if t.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: t.len() });
        }
    }
    if samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples(samples));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let v = random_rotation(&mut rng).cosine_product(lab, mol);
        sum += v;
        sum_sq += v * v;
    }
    let count = samples as f64;
    let mean = sum / count;
    let var = (sum_sq / count - mean * mean).max(0.0) * count / (count - 1.0);
    Ok(McEstimate { estimate: mean, stderr: (var / count).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let r = random_rotation(&mut rng);
            assert!(r.orthogonality_residual() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_estimate_within_three_sigma() {
        let t: IndexTuple = "xyzzz".parse().unwrap();
        let est = mc_component(5, &t, &t, 1_000_000, 42).unwrap();
        assert!((est.estimate - 0.1).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn parity_violating_estimate_near_zero() {
        let t: IndexTuple = "xxyzz".parse().unwrap();
        let est = mc_component(5, &t, &t, 100_000, 3).unwrap();
        assert!(est.estimate.abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let t: IndexTuple = "xyzzz".parse().unwrap();
        let a = mc_component(5, &t, &t, 1000, 9).unwrap();
        let b = mc_component(5, &t, &t, 1000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(mc_component(5, &t, &t, 99, 9), Err(Error::TooFewSamples(99)));
    }
}
