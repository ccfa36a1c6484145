//! SO(3) backed by 3x3 rotation matrices.
//!
//! Algebra basis: the generators of rotations about x, y and z, so the
//! components of an algebra vector form the usual rotation vector.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::group::{AlgebraVector, LieGroup};
use crate::math::{self, PI};
use crate::{Error, Result};

pub type Mat3 = [[f64; 3]; 3];

const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Within this distance of `pi` the rotation axis is recovered from the
/// symmetric part of `R`, since the antisymmetric part vanishes.
pub const NEAR_PI: f64 = 1e-6;

/// Largest orthogonality defect accepted when reading coordinates back in.
pub const MAX_IMPORT_DEFECT: f64 = 1e-6;

/// A rotation matrix. Row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct So3 {
    m: Mat3,
}

fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

fn transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[j][i] = *v;
        }
    }
    out
}

fn det(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

impl So3 {
    pub const IDENTITY: So3 = So3 { m: IDENTITY };

    /// Wraps a matrix without checking it.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Self { m }
    }

    /// Wraps a matrix if its orthogonality defect is below `tol`.
    pub fn from_matrix(m: Mat3, tol: f64) -> Result<Self> {
        let r = Self { m };
        let d = r.defect();
        if d.is_finite() && d <= tol {
            Ok(r)
        } else {
            Err(Error::InvalidArgument(format!("not a rotation matrix (defect {d:e})")))
        }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn compose(&self, other: &So3) -> So3 {
        So3 { m: matmul(&self.m, &other.m) }
    }

    pub fn inverse(&self) -> So3 {
        So3 { m: transpose(&self.m) }
    }

    /// Rodrigues: `I + sinc(q) K + sinc^2(q/2)/2 K^2` with `K = [c]_x`, `q = |c|`.
    pub fn exp(c: [f64; 3]) -> So3 {
        let q = math::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
        let a = math::sinc(q);
        let h = math::sinc(0.5 * q);
        let b = 0.5 * h * h;
        let k = [[0.0, -c[2], c[1]], [c[2], 0.0, -c[0]], [-c[1], c[0], 0.0]];
        let k2 = matmul(&k, &k);
        let mut m = IDENTITY;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += a * k[i][j] + b * k2[i][j];
            }
        }
        So3 { m }
    }

    /// Rotation vector with norm in `[0, pi]`.
    pub fn log(&self) -> [f64; 3] {
        let m = &self.m;
        // axial vector of R - R^T, equal to 2 sin(q) n
        let axial = [m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]];
        let sin_q = 0.5 * math::sqrt(axial[0] * axial[0] + axial[1] * axial[1] + axial[2] * axial[2]);
        let cos_q = (0.5 * (m[0][0] + m[1][1] + m[2][2] - 1.0)).clamp(-1.0, 1.0);
        let q = math::atan2(sin_q, cos_q);

        if PI - q > NEAR_PI {
            let k = 0.5 * math::inv_sinc(q);
            return [k * axial[0], k * axial[1], k * axial[2]];
        }

        // (R + R^T)/2 - cos(q) I = (1 - cos q) n n^T
        let scale = 1.0 / (1.0 - cos_q);
        let mut nn = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let sym = 0.5 * (m[i][j] + m[j][i]) - if i == j { cos_q } else { 0.0 };
                nn[i][j] = sym * scale;
            }
        }
        let pivot = (0..3).fold(0, |best, i| if nn[i][i] > nn[best][best] { i } else { best });
        let mut n = nn[pivot];
        let norm = math::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
        for v in n.iter_mut() {
            *v /= norm;
        }
        if n[0] * axial[0] + n[1] * axial[1] + n[2] * axial[2] < 0.0 {
            for v in n.iter_mut() {
                *v = -*v;
            }
        }
        [q * n[0], q * n[1], q * n[2]]
    }

    /// `max(|R^T R - I|_F, |det R - 1|)`.
    pub fn defect(&self) -> f64 {
        let fro = self.orthogonality_defect();
        let det_err = (det(&self.m) - 1.0).abs();
        if fro.is_nan() || det_err.is_nan() {
            return f64::INFINITY;
        }
        fro.max(det_err)
    }

    /// Frobenius-norm orthogonality defect `|R^T R - I|_F` alone.
    pub fn orthogonality_defect(&self) -> f64 {
        let rtr = matmul(&transpose(&self.m), &self.m);
        let mut fro = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d = rtr[i][j] - IDENTITY[i][j];
                fro += d * d;
            }
        }
        math::sqrt(fro)
    }

    /// Polar projection onto SO(3) by the Newton iteration
    /// `R <- (R + R^-T) / 2`. Not applied automatically anywhere.
    pub fn orthonormalized(&self) -> So3 {
        let mut r = self.m;
        for _ in 0..8 {
            let d = det(&r);
            // cofactor matrix / det = R^-T
            let cof = [
                [
                    r[1][1] * r[2][2] - r[1][2] * r[2][1],
                    r[1][2] * r[2][0] - r[1][0] * r[2][2],
                    r[1][0] * r[2][1] - r[1][1] * r[2][0],
                ],
                [
                    r[0][2] * r[2][1] - r[0][1] * r[2][2],
                    r[0][0] * r[2][2] - r[0][2] * r[2][0],
                    r[0][1] * r[2][0] - r[0][0] * r[2][1],
                ],
                [
                    r[0][1] * r[1][2] - r[0][2] * r[1][1],
                    r[0][2] * r[1][0] - r[0][0] * r[1][2],
                    r[0][0] * r[1][1] - r[0][1] * r[1][0],
                ],
            ];
            for i in 0..3 {
                for j in 0..3 {
                    r[i][j] = 0.5 * (r[i][j] + cof[i][j] / d);
                }
            }
        }
        So3 { m: r }
    }
}

impl Default for So3 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// SO(3) as a [`LieGroup`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct So3Group;

impl LieGroup for So3Group {
    type Element = So3;

    fn name(&self) -> String {
        "so3".to_string()
    }

    fn dim(&self) -> usize {
        3
    }

    fn identity(&self) -> So3 {
        So3::IDENTITY
    }

    fn product(&self, g: &So3, h: &So3) -> So3 {
        g.compose(h)
    }

    fn inverse(&self, g: &So3) -> So3 {
        g.inverse()
    }

    fn exp(&self, c: &[f64]) -> So3 {
        assert_eq!(c.len(), 3, "so(3) vectors have 3 components");
        So3::exp([c[0], c[1], c[2]])
    }

    fn log(&self, g: &So3) -> AlgebraVector {
        g.log().to_vec()
    }

    fn encoding(&self) -> String {
        "so3:matrix9".to_string()
    }

    fn feature_dim(&self) -> usize {
        9
    }

    fn features_into(&self, g: &So3, out: &mut Vec<f64>) {
        for row in &g.m {
            out.extend_from_slice(row);
        }
    }

    fn coord_dim(&self) -> usize {
        9
    }

    fn coord_names(&self) -> Vec<String> {
        (0..9).map(|k| format!("r{}{}", k / 3, k % 3)).collect()
    }

    fn coords_into(&self, g: &So3, out: &mut Vec<f64>) {
        self.features_into(g, out);
    }

    fn from_coords(&self, coords: &[f64]) -> Result<So3> {
        if coords.len() != 9 {
            return Err(Error::DimensionMismatch { expected: 9, found: coords.len() });
        }
        let mut m = [[0.0; 3]; 3];
        for (k, v) in coords.iter().enumerate() {
            m[k / 3][k % 3] = *v;
        }
        So3::from_matrix(m, MAX_IMPORT_DEFECT)
    }

    fn defect(&self, g: &So3) -> f64 {
        g.defect()
    }

    /// Haar-uniform rotation from a normalized Gaussian quaternion.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> So3 {
        let mut q = [0.0f64; 4];
        let mut norm = 0.0;
        while norm < 1e-6 {
            for v in q.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            norm = math::sqrt(q.iter().map(|v| v * v).sum());
        }
        let [w, x, y, z] = q.map(|v| v / norm);
        let m = [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ];
        So3 { m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    fn max_diff(a: &Mat3, b: &Mat3) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((a[i][j] - b[i][j]).abs());
            }
        }
        d
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(So3::exp([0.0; 3]), So3::IDENTITY);
        assert_eq!(So3::IDENTITY.log(), [0.0; 3]);
    }

    #[test]
    fn quarter_turn_about_z() {
        let r = So3::exp([0.0, 0.0, FRAC_PI_2]);
        let expected = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(max_diff(r.matrix(), &expected) < 1e-15);
        let c = r.log();
        assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15);
        assert!((c[2] - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn inverse_is_transpose() {
        let r = So3::exp([0.3, -0.2, 0.1]);
        assert_eq!(r.inverse().matrix(), &transpose(r.matrix()));
        assert!(max_diff(r.compose(&r.inverse()).matrix(), &IDENTITY) < 1e-15);
    }

    #[test]
    fn half_turn_uses_symmetric_branch() {
        for axis in [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [-0.48, 0.6, 0.64]] {
            for &q in &[PI, PI - 1e-7, PI - 1e-9] {
                let c = [q * axis[0], q * axis[1], q * axis[2]];
                let r = So3::exp(c);
                let back = So3::exp(r.log());
                assert!(max_diff(back.matrix(), r.matrix()) < 1e-12, "q = {q}");
            }
        }
    }

    #[test]
    fn polar_projection_repairs_drift() {
        let mut m = *So3::exp([0.4, 0.1, -0.9]).matrix();
        m[0][1] += 1e-4;
        m[2][2] -= 2e-4;
        let r = So3::from_matrix_unchecked(m);
        assert!(r.defect() > 1e-5);
        assert!(r.orthonormalized().defect() < 1e-14);
    }

    #[test]
    fn rejects_non_rotations() {
        let mut coords = [0.0; 9];
        coords[0] = 2.0;
        assert!(So3Group.from_coords(&coords).is_err());
        let reflection = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0];
        assert!(So3Group.from_coords(&reflection).is_err());
    }
}
