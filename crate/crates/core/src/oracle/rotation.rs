use crate::combinatorics::{Axis, IndexTuple};

/// A proper rotation as a 3x3 matrix of direction cosines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSample {
    pub matrix: [[f64; 3]; 3],
}

/// Quarter turn taking y to z and z to y (paired with x to -x).
pub const SWAP_YZ: RotationSample = RotationSample { matrix: [[-1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]] };

impl RotationSample {
    /// z-x-z Euler angles in the same parametrization as the exact oracle.
    pub fn from_euler(psi: f64, phi: f64, theta: f64) -> Self {
        let (sp, cp) = psi.sin_cos();
        let (sf, cf) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        RotationSample {
            matrix: [
                [cp * cf - ct * sf * sp, cp * sf + ct * cf * sp, sp * st],
                [-sp * cf - ct * sf * cp, -sp * sf + ct * cf * cp, cp * st],
                [st * sf, -st * cf, ct],
            ],
        }
    }

    /// Rotation matrix of the unit quaternion `(w, x, y, z)`.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        RotationSample {
            matrix: [
                [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
                [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
                [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
            ],
        }
    }

    pub fn get(&self, row: Axis, col: Axis) -> f64 {
        self.matrix[row.index()][col.index()]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entry of `|R R^T - 1|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `prod_k l[lab_k][mol_k]`.
    pub fn cosine_product(&self, lab: &IndexTuple, mol: &IndexTuple) -> f64 {
        lab.axes().iter().zip(mol.axes()).map(|(&i, &l)| self.get(i, l)).product()
    }
}

/// Relabels lab axes by [`SWAP_YZ`]: returns the sign `(-1)^{#x}` and the
/// tuple with y and z exchanged, so that `I(lab; mol) = sign * I(swapped; mol)`.
pub fn swap_yz(idx: &IndexTuple) -> (i32, IndexTuple) {
    let mut sign = 1;
    let axes = idx
        .axes()
        .iter()
        .map(|&a| match a {
            Axis::X => {
                sign = -sign;
                Axis::X
            }
            Axis::Y => Axis::Z,
            Axis::Z => Axis::Y,
        })
        .collect();
    (sign, IndexTuple(axes))
}
