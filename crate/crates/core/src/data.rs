//! Toy source/target distributions on the shipped groups.
//!
//! Distributions are named by short ids resolved against a group:
//!
//! | id          | R^1 / R^2                  | SE(2)                           | SO(3)                         |
//! |-------------|----------------------------|---------------------------------|-------------------------------|
//! | `hline`     | points `(s, 0)`            | `(s, 0, 0)`, heading along x    | 90 degree arc of the equator  |
//! | `vline`     | points `(0, s)` (R^2 only) | `(0, s, pi/2)`, heading along y | 90 degree arc of a meridian   |
//! | `circle`    | radius-r circle (R^2 only) | radius-r circle, tangent heading| full equator, tangent frames  |
//! | `gaussian`  | `N(0, spread^2 I)`         | `exp(N(0, spread^2 I))`         | `exp(N(0, spread^2 I))`       |
//! | `delta:...` | point mass at the coords   | point mass at `x,y,theta`       | point mass at `exp(c)`        |
//!
//! `s` is uniform on `[-extent, extent]` (scaled by `pi/4` on SO(3)). Every
//! shape except `delta` gets independent Gaussian jitter of size `sigma`.
//! Product groups take one id per factor joined by `+`, e.g.
//! `hline+gaussian` on `se2xr2`. An id may carry its group as a prefix
//! (`se2-hline`).
//!
//! On SO(3) an arrow is read as position `R e3` and heading `R e1`; a sample
//! is `exp(s A_axis) R_base exp(sigma xi)` with `xi ~ N(0, I)`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::group::LieGroup;
use crate::groups::{Element, Group, Se2, So3};
use crate::math::{self, FRAC_PI_2, FRAC_PI_4, TAU};
use crate::{Error, Result};

/// Numeric knobs shared by all presets.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistributionParams {
    /// Half-length of the lines.
    pub extent: f64,
    /// Circle radius.
    pub radius: f64,
    /// Jitter standard deviation.
    pub sigma: f64,
    /// Standard deviation of the `gaussian` preset.
    pub spread: f64,
}

impl Default for DistributionParams {
    fn default() -> Self {
        Self { extent: 1.0, radius: 0.7, sigma: 0.05, spread: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    HLine,
    VLine,
    Circle,
    Gaussian,
    Point(Element),
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Single(Shape),
    Product(Vec<Distribution>),
}

/// A named distribution bound to a group.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    group: Group,
    id: String,
    params: DistributionParams,
    kind: Kind,
}

// R_base with R e3 = e1 (on the equator) and R e1 = e2 (heading east).
const BASE_EQUATOR: [[f64; 3]; 3] = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
// R_base with R e3 = e1 and R e1 = e3 (heading north).
const BASE_MERIDIAN: [[f64; 3]; 3] = [[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]];

impl Distribution {
    /// Resolves `id` against `group`.
    pub fn parse(group: &Group, id: &str, params: DistributionParams) -> Result<Self> {
        let id = id.trim();
        let unknown = || Error::UnknownDistribution(format!("{id} (group {})", group.name()));
        if !(params.extent.is_finite() && params.radius.is_finite() && params.sigma >= 0.0 && params.spread >= 0.0) {
            return Err(Error::InvalidArgument(format!("invalid distribution parameters {params:?}")));
        }
        if let Group::Product(p) = group {
            let parts: Vec<&str> = id.split('+').collect();
            if parts.len() != p.factors().len() {
                return Err(unknown());
            }
            let factors = p
                .factors()
                .iter()
                .zip(parts)
                .map(|(f, part)| Distribution::parse(f, part, params))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self { group: group.clone(), id: id.to_string(), params, kind: Kind::Product(factors) });
        }

        let name = group.name();
        let bare = id.strip_prefix(name.as_str()).and_then(|r| r.strip_prefix('-')).unwrap_or(id);
        let shape = if let Some(rest) = bare.strip_prefix("delta") {
            let values = rest.strip_prefix(':').unwrap_or(rest);
            Shape::Point(point_mass(group, values).map_err(|_| unknown())?)
        } else {
            match bare {
                "hline" => Shape::HLine,
                "vline" => Shape::VLine,
                "circle" => Shape::Circle,
                "gaussian" => Shape::Gaussian,
                _ => return Err(unknown()),
            }
        };
        let supported = match (group, &shape) {
            (Group::Translation(t), Shape::VLine | Shape::Circle) => t.dim() == 2,
            (Group::Translation(t), Shape::HLine) => t.dim() <= 2,
            _ => true,
        };
        if !supported {
            return Err(unknown());
        }
        Ok(Self { group: group.clone(), id: id.to_string(), params, kind: Kind::Single(shape) })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn params(&self) -> &DistributionParams {
        &self.params
    }

    /// One draw.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        let shape = match &self.kind {
            Kind::Product(factors) => return Element::Tuple(factors.iter().map(|d| d.sample_one(rng)).collect()),
            Kind::Single(shape) => shape,
        };
        let p = &self.params;
        let jitter = |rng: &mut R| p.sigma * rng.sample::<f64, _>(StandardNormal);
        match (&self.group, shape) {
            (_, Shape::Point(g)) => g.clone(),
            (Group::Translation(t), Shape::Gaussian) => {
                Element::Vector((0..t.dim()).map(|_| p.spread * rng.sample::<f64, _>(StandardNormal)).collect())
            }
            (Group::Translation(t), Shape::HLine) => {
                let s = rng.random_range(-p.extent..=p.extent);
                let mut v = alloc::vec![s + jitter(rng)];
                if t.dim() == 2 {
                    v.push(jitter(rng));
                }
                Element::Vector(v)
            }
            (Group::Translation(_), Shape::VLine) => {
                let s = rng.random_range(-p.extent..=p.extent);
                let x = jitter(rng);
                Element::Vector(alloc::vec![x, s + jitter(rng)])
            }
            (Group::Translation(_), Shape::Circle) => {
                let phi = rng.random_range(0.0..TAU);
                let x = p.radius * math::cos(phi) + jitter(rng);
                Element::Vector(alloc::vec![x, p.radius * math::sin(phi) + jitter(rng)])
            }
            (Group::Se2(_), Shape::HLine) => {
                let s = rng.random_range(-p.extent..=p.extent);
                let (jx, jy, jt) = (jitter(rng), jitter(rng), jitter(rng));
                Element::Se2(Se2::new(s + jx, jy, jt))
            }
            (Group::Se2(_), Shape::VLine) => {
                let s = rng.random_range(-p.extent..=p.extent);
                let (jx, jy, jt) = (jitter(rng), jitter(rng), jitter(rng));
                Element::Se2(Se2::new(jx, s + jy, FRAC_PI_2 + jt))
            }
            (Group::Se2(_), Shape::Circle) => {
                let phi = rng.random_range(0.0..TAU);
                let (jx, jy, jt) = (jitter(rng), jitter(rng), jitter(rng));
                Element::Se2(Se2::new(
                    p.radius * math::cos(phi) + jx,
                    p.radius * math::sin(phi) + jy,
                    phi + FRAC_PI_2 + jt,
                ))
            }
            (Group::Se2(_) | Group::So3(_), Shape::Gaussian) => {
                let c: Vec<f64> = (0..3).map(|_| p.spread * rng.sample::<f64, _>(StandardNormal)).collect();
                self.group.exp(&c)
            }
            (Group::So3(_), Shape::HLine | Shape::VLine | Shape::Circle) => {
                let (base, axis, s) = match shape {
                    Shape::HLine => (BASE_EQUATOR, 2, p.extent * rng.random_range(-FRAC_PI_4..=FRAC_PI_4)),
                    Shape::VLine => (BASE_MERIDIAN, 1, p.extent * rng.random_range(-FRAC_PI_4..=FRAC_PI_4)),
                    _ => (BASE_EQUATOR, 2, rng.random_range(0.0..TAU)),
                };
                let mut c = [0.0; 3];
                c[axis] = s;
                let xi = [jitter(rng), jitter(rng), jitter(rng)];
                let r = So3::exp(c).compose(&So3::from_matrix_unchecked(base)).compose(&So3::exp(xi));
                Element::So3(r)
            }
            (Group::Product(_), _) => unreachable!("product distributions are handled above"),
        }
    }

    /// `n` independent draws.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<Element>> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        Ok((0..n).map(|_| self.sample_one(rng)).collect())
    }
}

/// Parses `delta` coordinates. Empty means the identity.
fn point_mass(group: &Group, values: &str) -> Result<Element> {
    if values.is_empty() {
        return Ok(group.identity());
    }
    let coords = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(v.to_string())))
        .collect::<Result<Vec<f64>>>()?;
    match group {
        Group::So3(_) => group.try_exp(&coords),
        _ => group.from_coords(&coords),
    }
}
