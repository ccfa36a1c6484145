//! Flow matching on Lie groups with surjective exponential maps.
//!
//! Samples on a group are transported by a learned, time-dependent vector
//! field whose components live in a fixed left-invariant frame. Training
//! regresses that field onto the conditional field whose integral curves are
//! exponential curves `g0 * exp(t * log(g0^-1 g1))`; sampling integrates the
//! learned field with Lie-Euler steps `g <- g * exp(dt * u)`, so every iterate
//! stays on the group.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. File formats
//! and the command line live in the `lieflow` crate.
#![no_std]

extern crate alloc;

pub mod adam;
pub mod data;
mod error;
pub mod eval;
pub mod flow;
pub mod group;
pub mod groups;
pub mod math;
pub mod mlp;
pub mod rng;
pub mod training;

pub use error::{Error, Result};
pub use group::{AlgebraVector, LieGroup, MetricWeights};
pub use groups::{Element, Group, ProductGroup, Se2, Se2Group, So3, So3Group, TranslationGroup};
