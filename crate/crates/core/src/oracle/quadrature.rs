//! Product quadrature over z-x-z Euler angles: uniform grids in psi and phi,
//! Gauss-Legendre in `cos(theta)`.

use std::f64::consts::PI;

use crate::combinatorics::IndexTuple;
use crate::error::{Error, Result};
use crate::oracle::rotation::RotationSample;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(count: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        // Chebyshev-like starting guess, then Newton on P_count.
        let mut x = (PI * (i as f64 + 0.75) / (count as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(count, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

#[derive(Debug, Clone)]
pub struct EulerQuadrature {
    pub points_psi: usize,
    pub points_phi: usize,
    pub points_theta: usize,
    rotations: Vec<(f64, RotationSample)>,
}

impl Default for EulerQuadrature {
    fn default() -> Self {
        EulerQuadrature::new(16, 16, 16)
    }
}

impl EulerQuadrature {
    pub fn new(points_psi: usize, points_phi: usize, points_theta: usize) -> Self {
        let nodes = gauss_legendre(points_theta);
        let mut rotations = Vec::with_capacity(points_psi * points_phi * points_theta);
        for a in 0..points_psi {
            let psi = 2.0 * PI * a as f64 / points_psi as f64;
            for b in 0..points_phi {
                let phi = 2.0 * PI * b as f64 / points_phi as f64;
                for &(u, w) in &nodes {
                    // The sin(theta) of the measure is absorbed by integrating in u = cos(theta).
                    let weight = w / 2.0 / (points_psi * points_phi) as f64;
                    rotations.push((weight, RotationSample::from_euler(psi, phi, u.acos())));
                }
            }
        }
        EulerQuadrature { points_psi, points_phi, points_theta, rotations }
    }

    /// Smallest grid dimension.
    pub fn min_points(&self) -> usize {
        self.points_psi.min(self.points_phi).min(self.points_theta)
    }

    /// Rejects grids too coarse to integrate rank-`n` products exactly.
    pub fn check_rank(&self, n: usize) -> Result<()> {
        let needed = n + 1;
        if self.min_points() < needed {
            return Err(Error::UndersizedQuadrature { rank: n, found: self.min_points(), needed });
        }
        Ok(())
    }

    /// Weighted sum of `f` over the grid; weights sum to one.
    pub fn average(&self, f: impl Fn(&RotationSample) -> f64) -> f64 {
        self.rotations.iter().map(|(w, r)| w * f(r)).sum()
    }
}

pub fn quad_component(n: usize, lab: &IndexTuple, mol: &IndexTuple, quad: &EulerQuadrature) -> Result<f64> {
    for t in [lab, mol] {
        if t.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: t.len() });
        }
    }
    quad.check_rank(n)?;
    Ok(quad.average(|r| r.cosine_product(lab, mol)))
}
