//! SE(2) stored directly as `(x, y, theta)`.
//!
//! Algebra basis: `A1 = d/dx`, `A2 = d/dy`, `A3 = d/dtheta` at the identity.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::group::{AlgebraVector, LieGroup};
use crate::math::{self, PI};
use crate::{Error, Result};

/// A roto-translation. `theta` is always kept in `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Se2 {
    pub x: f64,
    pub y: f64,
    theta: f64,
}

impl Se2 {
    pub const IDENTITY: Se2 = Se2 { x: 0.0, y: 0.0, theta: 0.0 };

    /// Builds an element, wrapping `theta` into `[-pi, pi)`.
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta: math::wrap_angle(theta) }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `(x, theta)(y, phi) = (x + R_theta y, theta + phi)`.
    pub fn compose(&self, other: &Se2) -> Se2 {
        let (s, c) = (math::sin(self.theta), math::cos(self.theta));
        Se2::new(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.theta + other.theta,
        )
    }

    /// `(x, theta)^-1 = (-R_theta^-1 x, -theta)`.
    pub fn inverse(&self) -> Se2 {
        let (s, c) = (math::sin(self.theta), math::cos(self.theta));
        Se2::new(-(c * self.x + s * self.y), -(-s * self.x + c * self.y), -self.theta)
    }

    pub fn exp(c: [f64; 3]) -> Se2 {
        Self::exp_with(c, math::sinc)
    }

    /// [`Se2::exp`] with a caller-supplied `sinc`. Used by the self-check to
    /// inject a fault.
    #[doc(hidden)]
    pub fn exp_with(c: [f64; 3], sinc: fn(f64) -> f64) -> Se2 {
        let half = 0.5 * c[2];
        let (s, co) = (math::sin(half), math::cos(half));
        let k = sinc(half);
        Se2::new(k * (c[0] * co - c[1] * s), k * (c[0] * s + c[1] * co), c[2])
    }

    /// Logarithm with range `R^2 x [-pi, pi)`.
    pub fn log(&self) -> [f64; 3] {
        let half = 0.5 * self.theta;
        let (s, c) = (math::sin(half), math::cos(half));
        let k = math::inv_sinc(half);
        [k * (self.x * c + self.y * s), k * (-self.x * s + self.y * c), self.theta]
    }

    /// Homogeneous 3x3 matrix `[[R_theta, x], [0, 1]]`.
    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        let (s, c) = (math::sin(self.theta), math::cos(self.theta));
        [[c, -s, self.x], [s, c, self.y], [0.0, 0.0, 1.0]]
    }
}

impl Default for Se2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// SE(2) as a [`LieGroup`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Se2Group;

fn as3(c: &[f64]) -> [f64; 3] {
    assert_eq!(c.len(), 3, "se(2) vectors have 3 components");
    [c[0], c[1], c[2]]
}

impl LieGroup for Se2Group {
    type Element = Se2;

    fn name(&self) -> String {
        "se2".to_string()
    }

    fn dim(&self) -> usize {
        3
    }

    fn identity(&self) -> Se2 {
        Se2::IDENTITY
    }

    fn product(&self, g: &Se2, h: &Se2) -> Se2 {
        g.compose(h)
    }

    fn inverse(&self, g: &Se2) -> Se2 {
        g.inverse()
    }

    fn exp(&self, c: &[f64]) -> Se2 {
        Se2::exp(as3(c))
    }

    fn log(&self, g: &Se2) -> AlgebraVector {
        g.log().to_vec()
    }

    fn encoding(&self) -> String {
        "se2:xy-cos-sin".to_string()
    }

    fn feature_dim(&self) -> usize {
        4
    }

    fn features_into(&self, g: &Se2, out: &mut Vec<f64>) {
        out.extend_from_slice(&[g.x, g.y, math::cos(g.theta), math::sin(g.theta)]);
    }

    fn coord_dim(&self) -> usize {
        3
    }

    fn coord_names(&self) -> Vec<String> {
        ["x", "y", "theta"].iter().map(|s| s.to_string()).collect()
    }

    fn coords_into(&self, g: &Se2, out: &mut Vec<f64>) {
        out.extend_from_slice(&[g.x, g.y, g.theta]);
    }

    fn from_coords(&self, coords: &[f64]) -> Result<Se2> {
        if coords.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: coords.len() });
        }
        Ok(Se2::new(coords[0], coords[1], coords[2]))
    }

    fn defect(&self, g: &Se2) -> f64 {
        if (-PI..PI).contains(&g.theta) && g.x.is_finite() && g.y.is_finite() {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Se2 {
        Se2::new(
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-PI..PI),
        )
    }
}
