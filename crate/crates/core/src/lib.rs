//! Proximity engine for homothets of a strictly convex, centrally symmetric
//! body in R³.
//!
//! The crate provides the K-norm kernel ([`geometry`]), brute-force ground
//! truth ([`oracle`]), vertical shallow cuttings of the distance-function
//! arrangement ([`cutting`]), dynamic intersection/nearest-neighbor indexes
//! ([`index`]), and graph algorithms that run over the implicit intersection
//! and proximity graphs ([`graph`]).

pub mod cutting;
pub mod error;
pub mod generate;
pub mod geometry;
pub mod graph;
pub mod index;
pub mod io;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{Aabb, ConvexBody, Homothet, Point, Scene};
pub use graph::GraphResult;
pub use index::{IndexKind, ProximityIndex};

/// Member identifier: the position of a homothet in its scene or index store.
pub type Id = usize;
