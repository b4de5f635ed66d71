//! Vertical shallow cuttings of the arrangement of distance functions.
//!
//! A cutting tiles a box of R³ by an octree. Each leaf box carries a prism
//! `box × (-∞, ceiling]`, where the ceiling is the graph of one sampled
//! distance function, and a conflict list of every member whose graph can
//! reach below that ceiling inside the box.

mod net;
mod radial;
mod verify;

pub use net::{net_sample_size, random_ranges, shallow_net_check, draw_shallow_net, NetReport, Range};
pub use radial::radial_level;
pub use verify::{verify_cutting, CuttingReport};

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Aabb, ConvexBody, Homothet, Point, Scene};
use crate::Id;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuttingConfig {
    /// Shallowness: the ceiling targets level `n / t`.
    pub t: f64,
    /// Sampling constant; sample size `⌈β t log₂(t+1)⌉`.
    pub beta: f64,
    /// Conflict lists are refined down to `c_conflict · n / t`.
    pub c_conflict: f64,
    pub max_depth: u32,
    pub probe_count: usize,
    /// Hard cap on the number of prisms; boxes past it become leaves.
    pub max_prisms: usize,
}

impl Default for CuttingConfig {
    fn default() -> Self {
        Self { t: 8.0, beta: 4.0, c_conflict: 8.0, max_depth: 24, probe_count: 10_000, max_prisms: 1 << 18 }
    }
}

impl CuttingConfig {
    pub fn with_t(t: f64) -> Self {
        Self { t, ..Self::default() }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.t >= 1.0 && self.beta >= 1.0 && self.c_conflict >= 2.0) {
            return Err(crate::Error::InvalidSpec(format!(
                "cutting needs t >= 1, beta >= 1, c_conflict >= 2 (got {}, {}, {})",
                self.t, self.beta, self.c_conflict
            )));
        }
        Ok(())
    }

    fn log_t(&self) -> f64 {
        (self.t + 1.0).log2()
    }

    /// `r = min(n, ⌈β t log₂(t+1)⌉)`.
    pub fn sample_size(&self, n: usize) -> usize {
        n.min((self.beta * self.t * self.log_t()).ceil() as usize).max(1)
    }

    /// `q = min(r, ⌈β log₂(t+1)⌉)`.
    pub fn sample_level(&self, r: usize) -> usize {
        r.min((self.beta * self.log_t()).ceil() as usize).max(1)
    }

    pub fn conflict_limit(&self, n: usize) -> usize {
        (self.c_conflict * n as f64 / self.t).floor() as usize
    }
}

/// `box × (-∞, ceiling]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prism {
    pub bbox: Aabb,
    /// Member whose graph is the ceiling; `None` is an unbounded ceiling.
    pub ceiling: Option<Id>,
    /// Range of the ceiling function over the box.
    pub ceiling_bounds: (f64, f64),
    pub conflict: Vec<Id>,
    /// Refinement gave up before the conflict list met its limit.
    pub flagged: bool,
}

impl Prism {
    /// Height of the ceiling above `x`.
    pub fn ceiling_at(&self, body: &ConvexBody, store: &[Homothet], x: &Point) -> f64 {
        match self.ceiling {
            Some(phi) => body.point_distance(&store[phi], x),
            None => f64::INFINITY,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
enum Cell {
    Leaf(u32),
    /// Children occupy eight consecutive cells starting here.
    Split(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutting {
    pub domain: Aabb,
    pub sample: Vec<Id>,
    pub q: usize,
    pub conflict_limit: usize,
    pub prisms: Vec<Prism>,
    cells: Vec<Cell>,
}

impl Cutting {
    /// Single prism over the whole domain with everything in conflict.
    pub fn trivial(ids: &[Id], domain: Aabb, conflict_limit: usize) -> Self {
        Self {
            domain,
            sample: Vec::new(),
            q: 0,
            conflict_limit,
            prisms: vec![Prism {
                bbox: domain,
                ceiling: None,
                ceiling_bounds: (f64::INFINITY, f64::INFINITY),
                conflict: ids.to_vec(),
                flagged: ids.len() > conflict_limit,
            }],
            cells: vec![Cell::Leaf(0)],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.prisms.len() == 1 && self.prisms[0].ceiling.is_none()
    }

    /// Prism whose box contains `x`, or `None` outside the domain.
    pub fn locate(&self, x: &Point) -> Option<usize> {
        if !self.domain.contains(x) {
            return None;
        }
        let mut cell = 0usize;
        let mut bbox = self.domain;
        loop {
            match self.cells[cell] {
                Cell::Leaf(p) => return Some(p as usize),
                Cell::Split(first) => {
                    let w = bbox.octant_of(x);
                    bbox = bbox.octant(w);
                    cell = first as usize + w;
                }
            }
        }
    }

    pub fn flagged_count(&self) -> usize {
        self.prisms.iter().filter(|p| p.flagged).count()
    }

    pub fn max_conflict(&self) -> usize {
        self.prisms.iter().map(|p| p.conflict.len()).max().unwrap_or(0)
    }

    pub fn total_conflict(&self) -> usize {
        self.prisms.iter().map(|p| p.conflict.len()).sum()
    }
}

/// Builds a cutting for the whole scene over its domain.
pub fn build_cutting<R: Rng + ?Sized>(scene: &Scene, config: &CuttingConfig, rng: &mut R) -> Cutting {
    let ids: Vec<Id> = (0..scene.len()).collect();
    build_cutting_for(&scene.body, scene.members(), &ids, *scene.domain(), config, rng)
}

/// Builds a cutting for the members `ids` of `store` over `domain`.
pub fn build_cutting_for<R: Rng + ?Sized>(
    body: &ConvexBody,
    store: &[Homothet],
    ids: &[Id],
    domain: Aabb,
    config: &CuttingConfig,
    rng: &mut R,
) -> Cutting {
    let n = ids.len();
    let limit = config.conflict_limit(n);
    if n == 0 || n as f64 <= config.t {
        return Cutting::trivial(ids, domain, limit);
    }
    let r = config.sample_size(n);
    let q = config.sample_level(r);
    let mut sample: Vec<Id> = sample_indices(rng, n, r).into_iter().map(|k| ids[k]).collect();
    sample.sort_unstable();

    let mut builder = Builder {
        body,
        store,
        all: ids,
        sample: &sample,
        q,
        limit,
        config,
        prisms: Vec::new(),
        cells: vec![Cell::Leaf(0)],
        scratch: Vec::with_capacity(r),
    };
    builder.refine(0, domain, 0, ids, f64::INFINITY);
    let (prisms, cells) = (builder.prisms, builder.cells);
    Cutting { domain, sample, q, conflict_limit: limit, prisms, cells }
}

struct Builder<'a> {
    body: &'a ConvexBody,
    store: &'a [Homothet],
    all: &'a [Id],
    sample: &'a [Id],
    q: usize,
    limit: usize,
    config: &'a CuttingConfig,
    prisms: Vec<Prism>,
    cells: Vec<Cell>,
    scratch: Vec<(f64, Id)>,
}

impl Builder<'_> {
    fn f(&self, id: Id, x: &Point) -> f64 {
        self.body.point_distance(&self.store[id], x)
    }

    /// Sample function at level `q` of the sample at `x`.
    fn ceiling_at(&mut self, x: &Point) -> Id {
        self.scratch.clear();
        for &s in self.sample {
            let v = self.body.point_distance(&self.store[s], x);
            self.scratch.push((v, s));
        }
        let (_, nth, _) = self
            .scratch
            .select_nth_unstable_by(self.q - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        nth.1
    }

    /// Rank of `phi` among the sample stays within `[⌈q/2⌉, 2q]` at the
    /// corners, the center, and the point of the box nearest `c_phi`, where
    /// `f_phi` dips lowest.
    fn ceiling_is_faithful(&self, phi: Id, bbox: &Aabb) -> bool {
        let lo = self.q.div_ceil(2);
        let hi = 2 * self.q;
        let corners = bbox.corners();
        let extra = [bbox.center(), bbox.clamp(&self.store[phi].center)];
        corners.iter().chain(extra.iter()).all(|x| {
            let v = self.f(phi, x);
            let rank = 1 + self.sample.iter().filter(|&&s| self.f(s, x) < v).count();
            (lo..=hi).contains(&rank)
        })
    }

    fn refine(&mut self, cell: usize, bbox: Aabb, depth: u32, candidates: &[Id], parent_hi: f64) {
        let center = bbox.center();
        let phi = self.ceiling_at(&center);
        let bounds = self.body.box_bounds(&self.store[phi], &bbox);
        // The parent's list covers every member below the parent's ceiling only.
        let pool = if bounds.1 <= parent_hi { candidates } else { self.all };
        let conflict: Vec<Id> = pool
            .iter()
            .copied()
            .filter(|&j| self.body.box_bounds(&self.store[j], &bbox).0 <= bounds.1)
            .collect();

        let too_big = conflict.len() > self.limit;
        let faithful = self.ceiling_is_faithful(phi, &bbox);
        let mut split = too_big || !faithful;
        if too_big && faithful {
            // Level at the center already over the limit: splitting cannot help.
            let ceiling = self.f(phi, &center);
            let intrinsic = conflict.iter().filter(|&&j| self.f(j, &center) <= ceiling).count();
            if intrinsic > self.limit {
                split = false;
            }
        }
        if depth >= self.config.max_depth || self.prisms.len() + 8 > self.config.max_prisms {
            split = false;
        }

        if split {
            let first = self.cells.len();
            self.cells[cell] = Cell::Split(first as u32);
            self.cells.extend(std::iter::repeat_n(Cell::Leaf(0), 8));
            for w in 0..8 {
                self.refine(first + w, bbox.octant(w), depth + 1, &conflict, bounds.1);
            }
        } else {
            self.cells[cell] = Cell::Leaf(self.prisms.len() as u32);
            let flagged = too_big || !faithful;
            self.prisms.push(Prism { bbox, ceiling: Some(phi), ceiling_bounds: bounds, flagged, conflict });
        }
    }
}
