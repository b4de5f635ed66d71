use serde::{Deserialize, Serialize};

use super::Point;

/// Axis-aligned box in R³.
///
/// Boxes produced by [`Aabb::octant`] are treated as half-open `[lo, hi)`
/// along every axis, except on faces shared with the root box, so that an
/// octree of such boxes partitions its root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub lo: Point,
    pub hi: Point,
}

impl Aabb {
    pub fn new(lo: Point, hi: Point) -> Self {
        debug_assert!((0..3).all(|k| lo[k] <= hi[k]), "inverted box {lo:?} {hi:?}");
        Self { lo, hi }
    }

    pub fn point(p: Point) -> Self {
        Self { lo: p, hi: p }
    }

    /// Smallest box containing all the points, or `None` for an empty iterator.
    pub fn enclosing<I: IntoIterator<Item = Point>>(points: I) -> Option<Self> {
        let mut iter = points.into_iter();
        let first = iter.next()?;
        let mut b = Self::point(first);
        for p in iter {
            b.grow_to(p);
        }
        Some(b)
    }

    pub fn grow_to(&mut self, p: Point) {
        for k in 0..3 {
            self.lo[k] = self.lo[k].min(p[k]);
            self.hi[k] = self.hi[k].max(p[k]);
        }
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        let mut b = *self;
        b.grow_to(other.lo);
        b.grow_to(other.hi);
        b
    }

    pub fn expanded(&self, margin: f64) -> Self {
        Self {
            lo: [self.lo[0] - margin, self.lo[1] - margin, self.lo[2] - margin],
            hi: [self.hi[0] + margin, self.hi[1] + margin, self.hi[2] + margin],
        }
    }

    pub fn center(&self) -> Point {
        [
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
            0.5 * (self.lo[2] + self.hi[2]),
        ]
    }

    pub fn extent(&self) -> Point {
        [self.hi[0] - self.lo[0], self.hi[1] - self.lo[1], self.hi[2] - self.lo[2]]
    }

    /// Euclidean length of the diagonal.
    pub fn diameter(&self) -> f64 {
        let e = self.extent();
        (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt()
    }

    pub fn longest_axis(&self) -> usize {
        let e = self.extent();
        if e[0] >= e[1] && e[0] >= e[2] {
            0
        } else if e[1] >= e[2] {
            1
        } else {
            2
        }
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point) -> bool {
        (0..3).all(|k| self.lo[k] <= p[k] && p[k] <= self.hi[k])
    }

    /// Half-open containment relative to `root`: the upper face is included
    /// only where it coincides with the root's upper face.
    pub fn contains_half_open(&self, p: &Point, root: &Aabb) -> bool {
        (0..3).all(|k| {
            self.lo[k] <= p[k] && (p[k] < self.hi[k] || (p[k] == self.hi[k] && self.hi[k] == root.hi[k]))
        })
    }

    /// Octant `which` (bit k set = upper half along axis k).
    pub fn octant(&self, which: usize) -> Aabb {
        let m = self.center();
        let mut lo = self.lo;
        let mut hi = self.hi;
        for k in 0..3 {
            if which >> k & 1 == 1 {
                lo[k] = m[k];
            } else {
                hi[k] = m[k];
            }
        }
        Aabb { lo, hi }
    }

    /// Octant index of `p` under the `>= mid goes up` convention.
    pub fn octant_of(&self, p: &Point) -> usize {
        let m = self.center();
        (0..3).fold(0, |acc, k| acc | (usize::from(p[k] >= m[k]) << k))
    }

    pub fn corners(&self) -> [Point; 8] {
        std::array::from_fn(|w| {
            [
                if w & 1 == 1 { self.hi[0] } else { self.lo[0] },
                if w & 2 == 2 { self.hi[1] } else { self.lo[1] },
                if w & 4 == 4 { self.hi[2] } else { self.lo[2] },
            ]
        })
    }

    /// Closest point of the box to `p` in every coordinate.
    pub fn clamp(&self, p: &Point) -> Point {
        [
            p[0].clamp(self.lo[0], self.hi[0]),
            p[1].clamp(self.lo[1], self.hi[1]),
            p[2].clamp(self.lo[2], self.hi[2]),
        ]
    }

    /// Corner of the box maximizing every |x_k - p_k|.
    pub fn farthest_corner(&self, p: &Point) -> Point {
        std::array::from_fn(|k| {
            if (p[k] - self.lo[k]).abs() >= (self.hi[k] - p[k]).abs() {
                self.lo[k]
            } else {
                self.hi[k]
            }
        })
    }
}
