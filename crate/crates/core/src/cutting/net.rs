//! Empirical shallow-ε-net checks.
//!
//! For a sample `N ⊆ X` and a family of ranges, the two net properties are
//!
//! * (i)  `|R∩N| ≤ ζ·log(1/ε)  ⇒  |R∩X| ≤ α(ζ+1)·ε|X|`
//! * (ii) `|R∩X| ≤ ζ·ε|X|      ⇒  |R∩N| ≤ α(ζ+1)·log(1/ε)`
//!
//! for every `ζ ≥ 0`. The tightest `ζ` for a range is the one at equality in
//! the premise, so each range yields a lower bound on `α`; the fitted `α` is
//! the maximum over the family. Logarithms are base 2 throughout.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Cutting;
use crate::geometry::{Aabb, ConvexBody, Homothet, Point, Scene};
use crate::Id;

/// A region of R⁴; a member is in the range when its graph meets the region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Range {
    /// Downward vertical ray from `(x, ρ)`: members with `f_j(x) ≤ ρ`.
    Ray { x: Point, rho: f64 },
    /// `box × (-∞, ceiling]` with the ceiling taken from a member.
    Prism { bbox: Aabb, ceiling: Id },
    /// `box × [lo, hi]`.
    Slab { bbox: Aabb, lo: f64, hi: f64 },
}

impl Range {
    pub fn contains(&self, body: &ConvexBody, store: &[Homothet], j: Id) -> bool {
        let h = &store[j];
        match self {
            Range::Ray { x, rho } => body.point_distance(h, x) <= *rho,
            Range::Prism { bbox, ceiling } => {
                body.box_bounds(h, bbox).0 <= body.box_bounds(&store[*ceiling], bbox).1
            }
            Range::Slab { bbox, lo, hi } => {
                let (a, b) = body.box_bounds(h, bbox);
                a <= *hi && b >= *lo
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetReport {
    pub epsilon: f64,
    pub sample_size: usize,
    pub range_count: usize,
    /// Smallest α satisfying property (i) over the family.
    pub alpha_i: f64,
    /// Smallest α satisfying property (ii) over the family.
    pub alpha_ii: f64,
    pub alpha: f64,
    /// Ranges that meet no member of X.
    pub empty_ranges: usize,
}

/// `⌈(d/ε) log₂(1/ε)⌉`, capped at `n`.
pub fn net_sample_size(n: usize, epsilon: f64, constant: f64) -> usize {
    let m = (constant / epsilon * (1.0 / epsilon).log2()).ceil() as usize;
    m.clamp(1, n.max(1))
}

pub fn shallow_net_check(scene: &Scene, sample: &[Id], ranges: &[Range], epsilon: f64) -> NetReport {
    let body = &scene.body;
    let store = scene.members();
    let x_len = scene.len() as f64;
    let log = (1.0 / epsilon).log2();
    let mut alpha_i: f64 = 0.0;
    let mut alpha_ii: f64 = 0.0;
    let mut empty_ranges = 0;
    for range in ranges {
        let in_x = (0..scene.len()).filter(|&j| range.contains(body, store, j)).count() as f64;
        let in_n = sample.iter().filter(|&&j| range.contains(body, store, j)).count() as f64;
        if in_x == 0.0 {
            empty_ranges += 1;
        }
        let zeta = in_n / log;
        alpha_i = alpha_i.max(in_x / ((zeta + 1.0) * epsilon * x_len));
        let zeta = in_x / (epsilon * x_len);
        alpha_ii = alpha_ii.max(in_n / ((zeta + 1.0) * log));
    }
    NetReport {
        epsilon,
        sample_size: sample.len(),
        range_count: ranges.len(),
        alpha_i,
        alpha_ii,
        alpha: alpha_i.max(alpha_ii),
        empty_ranges,
    }
}

/// Draws a sample of [`net_sample_size`] members, redrawing while the fitted
/// α exceeds `alpha_max`, at most `max_resamples` extra times. Returns the
/// last sample, its report and the number of draws used.
pub fn draw_shallow_net<R: Rng + ?Sized>(
    scene: &Scene,
    ranges: &[Range],
    epsilon: f64,
    constant: f64,
    alpha_max: f64,
    max_resamples: usize,
    rng: &mut R,
) -> (Vec<Id>, NetReport, usize) {
    let m = net_sample_size(scene.len(), epsilon, constant);
    let mut draws = 0;
    loop {
        draws += 1;
        let mut sample: Vec<Id> = sample_indices(rng, scene.len(), m).into_vec();
        sample.sort_unstable();
        let report = shallow_net_check(scene, &sample, ranges, epsilon);
        if report.alpha <= alpha_max || draws > max_resamples {
            return (sample, report, draws);
        }
    }
}

/// Mixed family: a third each of vertical rays, boxes with member ceilings
/// (optionally the prisms of `cutting`), and slabs.
pub fn random_ranges<R: Rng + ?Sized>(scene: &Scene, cutting: Option<&Cutting>, count: usize, rng: &mut R) -> Vec<Range> {
    let body = &scene.body;
    let store = scene.members();
    let d = *scene.domain();
    let n = scene.len();
    let point = |rng: &mut R| -> Point { std::array::from_fn(|k| rng.random_range(d.lo[k]..=d.hi[k])) };
    let sub_box = |rng: &mut R| -> Aabb {
        let c = point(rng);
        // side lengths spread over two orders of magnitude
        let frac = 10f64.powf(rng.random_range(-2.0..0.0));
        let e = d.extent();
        let half: Point = std::array::from_fn(|k| 0.5 * frac * e[k]);
        Aabb::new(std::array::from_fn(|k| c[k] - half[k]), std::array::from_fn(|k| c[k] + half[k]))
    };
    (0..count)
        .map(|i| match i % 3 {
            0 => {
                let x = point(rng);
                let j = rng.random_range(0..n);
                Range::Ray { x, rho: body.point_distance(&store[j], &x) }
            }
            1 => match cutting {
                Some(c) if !c.prisms.is_empty() && rng.random_bool(0.5) => {
                    let p = &c.prisms[rng.random_range(0..c.prisms.len())];
                    Range::Prism { bbox: p.bbox, ceiling: p.ceiling.unwrap_or_else(|| rng.random_range(0..n)) }
                }
                _ => Range::Prism { bbox: sub_box(rng), ceiling: rng.random_range(0..n) },
            },
            _ => {
                let bbox = sub_box(rng);
                let x = bbox.center();
                let j = rng.random_range(0..n);
                let v = body.point_distance(&store[j], &x);
                let w = rng.random_range(0.0..0.25) * d.diameter();
                Range::Slab { bbox, lo: v - w, hi: v + w }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_sample_is_informational() {
        let scene = generate(&GeneratorSpec { n: 200, seed: 3, ..GeneratorSpec::default() }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ranges = random_ranges(&scene, None, 300, &mut rng);
        let all: Vec<Id> = (0..200).collect();
        let r = shallow_net_check(&scene, &all, &ranges, 1.0 / 16.0);
        // with N = X, (ii) reduces to |R| / ((|R|/(ε n) + 1) log) <= ε n / log
        assert!(r.alpha_ii <= 200.0 / 16.0 / 4.0 + 1e-9);
        assert!(r.alpha.is_finite());
    }

    #[test]
    fn rays_under_the_envelope_are_empty() {
        let scene = generate(&GeneratorSpec { n: 50, seed: 9, ..GeneratorSpec::default() }).unwrap();
        let x = scene.domain().center();
        let min = scene.members().iter().map(|h| scene.body.point_distance(h, &x)).fold(f64::INFINITY, f64::min);
        let ranges = vec![Range::Ray { x, rho: min - 1.0 }];
        let r = shallow_net_check(&scene, &[0, 1, 2], &ranges, 0.25);
        assert_eq!(r.empty_ranges, 1);
        assert_eq!(r.alpha_ii, 0.0);
        assert_eq!(r.alpha_i, 0.0);
    }

    #[test]
    fn sample_size_formula() {
        assert_eq!(net_sample_size(4000, 1.0 / 16.0, 1.0), 64);
        assert_eq!(net_sample_size(10, 1.0 / 16.0, 1.0), 10);
    }
}
