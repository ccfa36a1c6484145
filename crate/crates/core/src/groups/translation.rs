use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::group::{AlgebraVector, LieGroup};
use crate::{Error, Result};

/// The additive group `R^d`: product is addition, `exp` and `log` are the
/// identity map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslationGroup {
    dim: usize,
}

impl TranslationGroup {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("translation group needs dim >= 1".into()));
        }
        Ok(Self { dim })
    }

    fn check(&self, len: usize) {
        assert_eq!(len, self.dim, "element of R^{} has wrong length {}", self.dim, len);
    }
}

impl LieGroup for TranslationGroup {
    type Element = Vec<f64>;

    fn name(&self) -> String {
        format!("r{}", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn identity(&self) -> Vec<f64> {
        alloc::vec![0.0; self.dim]
    }

    fn product(&self, g: &Vec<f64>, h: &Vec<f64>) -> Vec<f64> {
        self.check(g.len());
        self.check(h.len());
        g.iter().zip(h).map(|(a, b)| a + b).collect()
    }

    fn inverse(&self, g: &Vec<f64>) -> Vec<f64> {
        self.check(g.len());
        g.iter().map(|a| -a).collect()
    }

    fn exp(&self, c: &[f64]) -> Vec<f64> {
        self.check(c.len());
        c.to_vec()
    }

    fn log(&self, g: &Vec<f64>) -> AlgebraVector {
        self.check(g.len());
        g.clone()
    }

    fn encoding(&self) -> String {
        format!("r{}:coords", self.dim)
    }

    fn feature_dim(&self) -> usize {
        self.dim
    }

    fn features_into(&self, g: &Vec<f64>, out: &mut Vec<f64>) {
        out.extend_from_slice(g);
    }

    fn coord_dim(&self) -> usize {
        self.dim
    }

    fn coord_names(&self) -> Vec<String> {
        (0..self.dim).map(|i| format!("v{i}")).collect()
    }

    fn coords_into(&self, g: &Vec<f64>, out: &mut Vec<f64>) {
        out.extend_from_slice(g);
    }

    fn from_coords(&self, coords: &[f64]) -> Result<Vec<f64>> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: coords.len() });
        }
        Ok(coords.to_vec())
    }

    fn defect(&self, _g: &Vec<f64>) -> f64 {
        0.0
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dim).map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{conditional_field, exp_curve};

    #[test]
    fn exp_curve_is_the_line_segment() {
        let g = TranslationGroup::new(2).unwrap();
        let x0 = alloc::vec![0.5, -1.0];
        let x1 = alloc::vec![2.0, 3.0];
        for &t in &[0.0, 0.3, 0.5, 1.0] {
            let p = exp_curve(&g, &x0, &x1, t).unwrap();
            for i in 0..2 {
                let line = (1.0 - t) * x0[i] + t * x1[i];
                assert!((p[i] - line).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conditional_field_matches_euclidean_form() {
        let g = TranslationGroup::new(1).unwrap();
        let u = conditional_field(&g, &alloc::vec![0.25], &alloc::vec![1.0], 0.5).unwrap();
        assert_eq!(u, alloc::vec![1.5]);
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(TranslationGroup::new(0).is_err());
    }
}
