//! Convex bodies, the norms they induce, homothets and scenes.

mod aabb;
mod body;
mod scene;

pub use aabb::Aabb;
pub use body::{BodySpec, ConvexBody, Crossing};
pub use scene::{domain_of, Homothet, Scene, DEFAULT_MARGIN};

pub type Point = [f64; 3];

/// Absolute slack on homothet distances. A distance `≤ DIST_EPS` counts as
/// touching, so tangencies computed along different floating-point routes
/// agree.
pub const DIST_EPS: f64 = 1e-12;

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add_scaled(a: &Point, s: f64, d: &Point) -> Point {
    [a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2]]
}
