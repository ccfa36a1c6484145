//! Concrete groups and a runtime-selected [`Group`] that dispatches to them.

mod product;
mod se2;
mod so3;
mod translation;

pub use product::ProductGroup;
pub use se2::{Se2, Se2Group};
pub use so3::{Mat3, So3, So3Group, MAX_IMPORT_DEFECT, NEAR_PI};
pub use translation::TranslationGroup;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::group::{AlgebraVector, LieGroup};
use crate::{Error, Result};

/// A group chosen at runtime, e.g. from a command-line id.
#[derive(Debug, Clone, PartialEq)]
pub enum Group {
    Translation(TranslationGroup),
    Se2(Se2Group),
    So3(So3Group),
    Product(ProductGroup),
}

/// An element of a [`Group`].
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Vector(Vec<f64>),
    Se2(Se2),
    So3(So3),
    Tuple(Vec<Element>),
}

impl Element {
    fn kind(&self) -> String {
        match self {
            Element::Vector(v) => format!("r{}", v.len()),
            Element::Se2(_) => "se2".to_string(),
            Element::So3(_) => "so3".to_string(),
            Element::Tuple(parts) => {
                let names: Vec<String> = parts.iter().map(|p| p.kind()).collect();
                names.join("x")
            }
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Element::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_se2(&self) -> Option<&Se2> {
        match self {
            Element::Se2(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_so3(&self) -> Option<&So3> {
        match self {
            Element::So3(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Element]> {
        match self {
            Element::Tuple(p) => Some(p),
            _ => None,
        }
    }
}

impl Group {
    pub fn translation(dim: usize) -> Result<Self> {
        Ok(Group::Translation(TranslationGroup::new(dim)?))
    }

    pub fn se2() -> Self {
        Group::Se2(Se2Group)
    }

    pub fn so3() -> Self {
        Group::So3(So3Group)
    }

    pub fn product(factors: Vec<Group>) -> Result<Self> {
        Ok(Group::Product(ProductGroup::new(factors)?))
    }

    /// Parses ids such as `r1`, `r2`, `se2`, `so3`, `se2xr2`.
    pub fn from_id(id: &str) -> Result<Self> {
        let id = id.trim();
        if id.contains('x') {
            let factors = id.split('x').map(Self::parse_simple).collect::<Result<Vec<_>>>()?;
            return Self::product(factors).map_err(|_| Error::UnknownGroup(id.to_string()));
        }
        Self::parse_simple(id)
    }

    fn parse_simple(id: &str) -> Result<Self> {
        match id {
            "se2" => Ok(Self::se2()),
            "so3" => Ok(Self::so3()),
            _ => match id.strip_prefix('r').and_then(|d| d.parse::<usize>().ok()) {
                Some(d) if d >= 1 => Self::translation(d),
                _ => Err(Error::UnknownGroup(id.to_string())),
            },
        }
    }

    /// Checks that `g` has the shape of an element of this group.
    pub fn check(&self, g: &Element) -> Result<()> {
        let ok = match (self, g) {
            (Group::Translation(t), Element::Vector(v)) => v.len() == t.dim(),
            (Group::Se2(_), Element::Se2(_)) | (Group::So3(_), Element::So3(_)) => true,
            (Group::Product(p), Element::Tuple(parts)) => {
                if parts.len() != p.factors().len() {
                    false
                } else {
                    for (f, part) in p.factors().iter().zip(parts) {
                        f.check(part)?;
                    }
                    true
                }
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::GroupMismatch { expected: self.name(), found: g.kind() })
        }
    }

    /// [`LieGroup::product`] with shape checking instead of panics.
    pub fn try_product(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.product(g, h))
    }

    /// [`LieGroup::exp`] with a length check instead of a panic.
    pub fn try_exp(&self, c: &[f64]) -> Result<Element> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: c.len() });
        }
        Ok(self.exp(c))
    }
}

fn mismatch(group: &Group, g: &Element) -> ! {
    panic!("element {} does not belong to group {}", g.kind(), group.name())
}

macro_rules! dispatch {
    ($self:ident, $g:ident, |$grp:ident, $el:ident| $body:expr) => {
        match ($self, $g) {
            (Group::Translation($grp), Element::Vector($el)) => $body,
            (Group::Se2($grp), Element::Se2($el)) => $body,
            (Group::So3($grp), Element::So3($el)) => $body,
            (Group::Product($grp), Element::Tuple($el)) => $body,
            _ => mismatch($self, $g),
        }
    };
}

impl LieGroup for Group {
    type Element = Element;

    fn name(&self) -> String {
        match self {
            Group::Translation(g) => g.name(),
            Group::Se2(g) => g.name(),
            Group::So3(g) => g.name(),
            Group::Product(g) => g.name(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Group::Translation(g) => g.dim(),
            Group::Se2(g) => g.dim(),
            Group::So3(g) => g.dim(),
            Group::Product(g) => g.dim(),
        }
    }

    fn identity(&self) -> Element {
        match self {
            Group::Translation(g) => Element::Vector(g.identity()),
            Group::Se2(g) => Element::Se2(g.identity()),
            Group::So3(g) => Element::So3(g.identity()),
            Group::Product(g) => Element::Tuple(g.identity()),
        }
    }

    fn product(&self, g: &Element, h: &Element) -> Element {
        match (self, g, h) {
            (Group::Translation(t), Element::Vector(a), Element::Vector(b)) => Element::Vector(t.product(a, b)),
            (Group::Se2(t), Element::Se2(a), Element::Se2(b)) => Element::Se2(t.product(a, b)),
            (Group::So3(t), Element::So3(a), Element::So3(b)) => Element::So3(t.product(a, b)),
            (Group::Product(t), Element::Tuple(a), Element::Tuple(b)) => Element::Tuple(t.product(a, b)),
            _ => {
                if self.check(g).is_err() {
                    mismatch(self, g)
                } else {
                    mismatch(self, h)
                }
            }
        }
    }

    fn inverse(&self, g: &Element) -> Element {
        match (self, g) {
            (Group::Translation(t), Element::Vector(a)) => Element::Vector(t.inverse(a)),
            (Group::Se2(t), Element::Se2(a)) => Element::Se2(t.inverse(a)),
            (Group::So3(t), Element::So3(a)) => Element::So3(t.inverse(a)),
            (Group::Product(t), Element::Tuple(a)) => Element::Tuple(t.inverse(a)),
            _ => mismatch(self, g),
        }
    }

    fn exp(&self, c: &[f64]) -> Element {
        match self {
            Group::Translation(g) => Element::Vector(g.exp(c)),
            Group::Se2(g) => Element::Se2(g.exp(c)),
            Group::So3(g) => Element::So3(g.exp(c)),
            Group::Product(g) => Element::Tuple(g.exp(c)),
        }
    }

    fn log(&self, g: &Element) -> AlgebraVector {
        dispatch!(self, g, |grp, el| grp.log(el))
    }

    fn left_pushforward(&self, g: &Element, a: &[f64]) -> AlgebraVector {
        dispatch!(self, g, |grp, el| grp.left_pushforward(el, a))
    }

    fn encoding(&self) -> String {
        match self {
            Group::Translation(g) => g.encoding(),
            Group::Se2(g) => g.encoding(),
            Group::So3(g) => g.encoding(),
            Group::Product(g) => g.encoding(),
        }
    }

    fn feature_dim(&self) -> usize {
        match self {
            Group::Translation(g) => g.feature_dim(),
            Group::Se2(g) => g.feature_dim(),
            Group::So3(g) => g.feature_dim(),
            Group::Product(g) => g.feature_dim(),
        }
    }

    fn features_into(&self, g: &Element, out: &mut Vec<f64>) {
        dispatch!(self, g, |grp, el| grp.features_into(el, out))
    }

    fn coord_dim(&self) -> usize {
        match self {
            Group::Translation(g) => g.coord_dim(),
            Group::Se2(g) => g.coord_dim(),
            Group::So3(g) => g.coord_dim(),
            Group::Product(g) => g.coord_dim(),
        }
    }

    fn coord_names(&self) -> Vec<String> {
        match self {
            Group::Translation(g) => g.coord_names(),
            Group::Se2(g) => g.coord_names(),
            Group::So3(g) => g.coord_names(),
            Group::Product(g) => g.coord_names(),
        }
    }

    fn coords_into(&self, g: &Element, out: &mut Vec<f64>) {
        dispatch!(self, g, |grp, el| grp.coords_into(el, out))
    }

    fn from_coords(&self, coords: &[f64]) -> Result<Element> {
        Ok(match self {
            Group::Translation(g) => Element::Vector(g.from_coords(coords)?),
            Group::Se2(g) => Element::Se2(g.from_coords(coords)?),
            Group::So3(g) => Element::So3(g.from_coords(coords)?),
            Group::Product(g) => Element::Tuple(g.from_coords(coords)?),
        })
    }

    fn defect(&self, g: &Element) -> f64 {
        dispatch!(self, g, |grp, el| grp.defect(el))
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        match self {
            Group::Translation(g) => Element::Vector(g.random(rng)),
            Group::Se2(g) => Element::Se2(g.random(rng)),
            Group::So3(g) => Element::So3(g.random(rng)),
            Group::Product(g) => Element::Tuple(g.random(rng)),
        }
    }
}
