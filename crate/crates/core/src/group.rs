//! The group interface and the flow-matching operations that need nothing
//! beyond it: exponential curves, the conditional flow field and the
//! left-invariant metric.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Debug;

use rand::Rng;

use crate::math;
use crate::{Error, Result};

/// Lie-algebra components with respect to the fixed left-invariant frame
/// `{A_i}` at the identity. Length is always `dim G`.
pub type AlgebraVector = Vec<f64>;

/// A Lie group with a surjective exponential map.
///
/// Elements are plain values; the group object carries only static data
/// (dimension, factor list). Every method is a pure function.
pub trait LieGroup {
    type Element: Clone + Debug + PartialEq;

    /// Short identifier, e.g. `se2`, `r2`, `se2xr2`.
    fn name(&self) -> String;

    /// Number of Lie-algebra basis directions.
    fn dim(&self) -> usize;

    fn identity(&self) -> Self::Element;

    fn product(&self, g: &Self::Element, h: &Self::Element) -> Self::Element;

    fn inverse(&self, g: &Self::Element) -> Self::Element;

    /// Time-one point of the one-parameter subgroup with initial velocity `c`.
    ///
    /// Panics if `c.len() != self.dim()`.
    fn exp(&self, c: &[f64]) -> Self::Element;

    /// Inverse of [`LieGroup::exp`] on the group's restricted domain.
    fn log(&self, g: &Self::Element) -> AlgebraVector;

    /// Components of `(L_g)_* A` in the left-invariant frame at `g`.
    ///
    /// Expressed in a left-invariant frame the push-forward of left
    /// multiplication leaves the components unchanged.
    fn left_pushforward(&self, _g: &Self::Element, a: &[f64]) -> AlgebraVector {
        a.to_vec()
    }

    /// Tag identifying [`LieGroup::features_into`]'s layout.
    fn encoding(&self) -> String;

    fn feature_dim(&self) -> usize;

    /// Appends the network input encoding of `g` to `out`.
    fn features_into(&self, g: &Self::Element, out: &mut Vec<f64>);

    fn features(&self, g: &Self::Element) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.feature_dim());
        self.features_into(g, &mut out);
        out
    }

    /// Number of payload coordinates used by exported files.
    fn coord_dim(&self) -> usize;

    fn coord_names(&self) -> Vec<String>;

    /// Appends the raw payload of `g` (the values it is stored as).
    fn coords_into(&self, g: &Self::Element, out: &mut Vec<f64>);

    fn coords(&self, g: &Self::Element) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.coord_dim());
        self.coords_into(g, &mut out);
        out
    }

    /// Rebuilds an element from [`LieGroup::coords`] output.
    #[allow(clippy::wrong_self_convention)] // the group instance fixes the layout
    fn from_coords(&self, coords: &[f64]) -> Result<Self::Element>;

    /// How far `g` is from satisfying the group's element invariants
    /// (zero for translations and SE(2), orthogonality defect for SO(3)).
    fn defect(&self, g: &Self::Element) -> f64;

    /// Draws an element from a broad test distribution covering the group.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Element;
}

/// Positive weights `w_i` of a left-invariant metric: `|c|^2 = sum w_i c_i^2`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricWeights(Vec<f64>);

impl MetricWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("metric weights must be non-empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidArgument(alloc::format!(
                "metric weights must be positive and finite, got {w}"
            )));
        }
        Ok(Self(weights))
    }

    pub fn unit(dim: usize) -> Self {
        Self(alloc::vec![1.0; dim])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `sum_i w_i c_i^2`.
pub fn metric_sq_norm(c: &[f64], weights: &MetricWeights) -> f64 {
    assert_eq!(c.len(), weights.len(), "metric weights do not match algebra dimension");
    c.iter().zip(&weights.0).map(|(c, w)| w * c * c).sum()
}

/// Canonical distance `|log(g^-1 h)|` with unit weights.
pub fn distance<G: LieGroup>(group: &G, g: &G::Element, h: &G::Element) -> f64 {
    let delta = group.log(&group.product(&group.inverse(g), h));
    math::sqrt(delta.iter().map(|c| c * c).sum())
}

/// `g0 * exp(t * log(g0^-1 g1))` for `t` in `[0, 1]`.
pub fn exp_curve<G: LieGroup>(group: &G, g0: &G::Element, g1: &G::Element, t: f64) -> Result<G::Element> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::TimeOutOfRange(t));
    }
    let a = group.log(&group.product(&group.inverse(g0), g1));
    Ok(exp_curve_with(group, g0, &a, t))
}

/// Point at time `t` on the exponential curve leaving `g0` with velocity `a`.
pub(crate) fn exp_curve_with<G: LieGroup>(group: &G, g0: &G::Element, a: &[f64], t: f64) -> G::Element {
    let scaled: Vec<f64> = a.iter().map(|c| t * c).collect();
    group.product(g0, &group.exp(&scaled))
}

/// Conditional flow field `(L_g)_* log(g^-1 g1) / (1 - t)` whose integral
/// curves are the exponential curves ending in `g1`.
pub fn conditional_field<G: LieGroup>(
    group: &G,
    g: &G::Element,
    g1: &G::Element,
    t: f64,
) -> Result<AlgebraVector> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::TimeOutOfRange(t));
    }
    let a = group.log(&group.product(&group.inverse(g), g1));
    let scale = 1.0 / (1.0 - t);
    Ok(group.left_pushforward(g, &a).into_iter().map(|c| c * scale).collect())
}

/// Constant velocity `log(g0^-1 g1)` of the exponential curve from `g0` to
/// `g1`; equals the conditional field evaluated anywhere along that curve.
pub fn curve_velocity<G: LieGroup>(group: &G, g0: &G::Element, g1: &G::Element) -> AlgebraVector {
    group.log(&group.product(&group.inverse(g0), g1))
}
