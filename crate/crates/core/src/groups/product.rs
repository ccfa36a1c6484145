use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::{Element, Group};
use crate::group::{AlgebraVector, LieGroup};
use crate::{Error, Result};

/// Direct product `G_1 x ... x G_k`. Every operation acts factor-wise and
/// algebra vectors are the concatenation of the factors' components.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGroup {
    factors: Vec<Group>,
}

impl ProductGroup {
    pub fn new(factors: Vec<Group>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("product group needs at least one factor".into()));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[Group] {
        &self.factors
    }

    fn parts<'a>(&self, g: &'a [Element]) -> &'a [Element] {
        assert_eq!(g.len(), self.factors.len(), "product element has wrong number of parts");
        g
    }

    /// Splits a concatenated vector into per-factor slices of the given sizes.
    fn split<'a>(&self, v: &'a [f64], size: impl Fn(&Group) -> usize) -> Vec<&'a [f64]> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut start = 0;
        for f in &self.factors {
            let n = size(f);
            out.push(&v[start..start + n]);
            start += n;
        }
        assert_eq!(start, v.len(), "vector length does not match product group");
        out
    }
}

impl LieGroup for ProductGroup {
    type Element = Vec<Element>;

    fn name(&self) -> String {
        let names: Vec<String> = self.factors.iter().map(|f| f.name()).collect();
        names.join("x")
    }

    fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).sum()
    }

    fn identity(&self) -> Vec<Element> {
        self.factors.iter().map(|f| f.identity()).collect()
    }

    fn product(&self, g: &Vec<Element>, h: &Vec<Element>) -> Vec<Element> {
        let (g, h) = (self.parts(g), self.parts(h));
        self.factors.iter().zip(g.iter().zip(h)).map(|(f, (a, b))| f.product(a, b)).collect()
    }

    fn inverse(&self, g: &Vec<Element>) -> Vec<Element> {
        self.factors.iter().zip(self.parts(g)).map(|(f, a)| f.inverse(a)).collect()
    }

    fn exp(&self, c: &[f64]) -> Vec<Element> {
        let parts = self.split(c, |f| f.dim());
        self.factors.iter().zip(parts).map(|(f, c)| f.exp(c)).collect()
    }

    fn log(&self, g: &Vec<Element>) -> AlgebraVector {
        let mut out = Vec::with_capacity(self.dim());
        for (f, a) in self.factors.iter().zip(self.parts(g)) {
            out.extend(f.log(a));
        }
        out
    }

    fn left_pushforward(&self, g: &Vec<Element>, a: &[f64]) -> AlgebraVector {
        let parts = self.split(a, |f| f.dim());
        let mut out = Vec::with_capacity(a.len());
        for ((f, g), a) in self.factors.iter().zip(self.parts(g)).zip(parts) {
            out.extend(f.left_pushforward(g, a));
        }
        out
    }

    fn encoding(&self) -> String {
        let tags: Vec<String> = self.factors.iter().map(|f| f.encoding()).collect();
        tags.join("|")
    }

    fn feature_dim(&self) -> usize {
        self.factors.iter().map(|f| f.feature_dim()).sum()
    }

    fn features_into(&self, g: &Vec<Element>, out: &mut Vec<f64>) {
        for (f, a) in self.factors.iter().zip(self.parts(g)) {
            f.features_into(a, out);
        }
    }

    fn coord_dim(&self) -> usize {
        self.factors.iter().map(|f| f.coord_dim()).sum()
    }

    fn coord_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            out.extend(f.coord_names().into_iter().map(|n| format!("f{i}_{n}")));
        }
        out
    }

    fn coords_into(&self, g: &Vec<Element>, out: &mut Vec<f64>) {
        for (f, a) in self.factors.iter().zip(self.parts(g)) {
            f.coords_into(a, out);
        }
    }

    fn from_coords(&self, coords: &[f64]) -> Result<Vec<Element>> {
        let expected = self.coord_dim();
        if coords.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coords.len() });
        }
        self.split(coords, |f| f.coord_dim())
            .into_iter()
            .zip(&self.factors)
            .map(|(c, f)| f.from_coords(c))
            .collect()
    }

    fn defect(&self, g: &Vec<Element>) -> f64 {
        self.factors
            .iter()
            .zip(self.parts(g))
            .map(|(f, a)| f.defect(a))
            .fold(0.0, f64::max)
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Element> {
        self.factors.iter().map(|f| f.random(rng)).collect()
    }
}
