//! Dynamic intersection-detection, reporting and nearest-neighbor indexes.
//!
//! All indexes answer the same contract through [`ProximityIndex`]: ids are
//! handed out by the index (`0..n` for the scene it was built from, then in
//! insertion order), a member intersects the query `K(c₀, ρ₀)` when
//! `f_i(c₀) ≤ ρ₀` (tangency included), and deleted ids are never returned.

mod brute;
mod fast;
mod grouped;
mod layered;
mod linear;

pub use brute::BruteIndex;
pub use fast::{Ctx, FastConfig, FastNode, RebuildEvent, RebuildLog};
pub use grouped::GroupedIndex;
pub use layered::FastIndex;
pub use linear::LinearIndex;

use serde::{Deserialize, Serialize};

use crate::geometry::{ConvexBody, Homothet, Scene};
use crate::{Error, Id, Result};

/// Default absolute tolerance of the nearest-neighbor radius search.
pub const DEFAULT_TOL_R: f64 = 1e-9;

pub trait ProximityIndex {
    fn body(&self) -> &ConvexBody;

    /// Number of live members.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn is_live(&self, id: Id) -> bool;

    /// Geometry of a member, live or deleted.
    fn homothet(&self, id: Id) -> Option<&Homothet>;

    /// Smallest live id, if any.
    fn any_live(&self) -> Option<Id>;

    /// Some live member intersecting `query`.
    fn detect(&self, query: &Homothet) -> Option<Id>;

    /// All live members intersecting `query`, sorted.
    fn report(&self, query: &Homothet) -> Vec<Id>;

    fn delete(&mut self, id: Id) -> Result<()>;

    fn insert(&mut self, h: Homothet) -> Id;

    /// Exact nearest live member and its homothet distance, ties by id.
    fn nn(&self, query: &Homothet) -> Result<(Id, f64)> {
        nn_query(self, query, DEFAULT_TOL_R)
    }

    fn stats(&self) -> IndexStats;
}

/// Nearest neighbor by bisection on the expansion radius.
///
/// Detection on `K(c₀, ρ₀ + r)` is monotone in `r`; the search brackets the
/// nearest distance to `tol_r`, then reports the members within the accepting
/// radius and picks the exact minimum among them.
pub fn nn_query<I: ProximityIndex + ?Sized>(index: &I, query: &Homothet, tol_r: f64) -> Result<(Id, f64)> {
    let any = index.any_live().ok_or(Error::Empty)?;
    let body = index.body();
    let candidates = if index.detect(query).is_some() {
        index.report(query)
    } else {
        let mut lo = 0.0;
        let mut hi = body.homothet_distance(query, index.homothet(any).expect("live member")).max(0.0);
        while hi - lo > tol_r {
            let mid = 0.5 * (lo + hi);
            if index.detect(&query.expanded(mid)).is_some() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        index.report(&query.expanded(hi))
    };
    candidates
        .into_iter()
        .map(|j| (j, body.homothet_distance(query, index.homothet(j).expect("reported member"))))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or(Error::Empty)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    /// Bentley–Saxe ladder of fast-query trees.
    #[default]
    Fast,
    /// Fast-query trees over groups of a fixed size.
    Grouped,
    /// Linear-size pruning tree over the points `(c, ρ)` of R⁴.
    Linear,
    /// Exhaustive scan.
    Oracle,
}

impl IndexKind {
    /// Structure for storage budget `s` with `n` members: groups of size
    /// `g = √(s/n)` use about `n·g²` storage; `g ≥ n` is the fast tree and
    /// `g` below the leaf size is the linear tree.
    pub fn from_budget(n: usize, s: f64, n0: usize) -> (IndexKind, usize) {
        let g = (s / n.max(1) as f64).sqrt().floor() as usize;
        if g >= n {
            (IndexKind::Fast, n)
        } else if g <= n0 {
            (IndexKind::Linear, g)
        } else {
            (IndexKind::Grouped, g)
        }
    }
}

impl std::str::FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(IndexKind::Fast),
            "grouped" => Ok(IndexKind::Grouped),
            "linear" => Ok(IndexKind::Linear),
            "oracle" => Ok(IndexKind::Oracle),
            other => Err(Error::InvalidSpec(format!("unknown structure `{other}`"))),
        }
    }
}

impl std::fmt::Display for IndexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IndexKind::Fast => "fast",
            IndexKind::Grouped => "grouped",
            IndexKind::Linear => "linear",
            IndexKind::Oracle => "oracle",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexConfig {
    pub kind: IndexKind,
    pub fast: FastConfig,
    /// Group size for [`IndexKind::Grouped`]; `⌈n^{1/3}⌉` when absent.
    pub group_size: Option<usize>,
    /// Bucket size of the linear tree.
    pub bucket: usize,
    pub seed: u64,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self { kind: IndexKind::Fast, fast: FastConfig::default(), group_size: None, bucket: 16, seed: 0 }
    }
}

impl IndexConfig {
    pub fn of_kind(kind: IndexKind) -> Self {
        Self { kind, ..Self::default() }
    }
}

pub type DynIndex = Box<dyn ProximityIndex + Send + Sync>;

pub fn build_index(scene: &Scene, cfg: &IndexConfig) -> DynIndex {
    match cfg.kind {
        IndexKind::Fast => Box::new(FastIndex::build(scene, cfg.fast.clone(), cfg.seed)),
        IndexKind::Grouped => {
            let g = cfg.group_size.unwrap_or_else(|| (scene.len() as f64).cbrt().ceil() as usize);
            Box::new(GroupedIndex::build(scene, g.max(1), cfg.fast.clone(), cfg.seed))
        }
        IndexKind::Linear => Box::new(LinearIndex::build(scene, cfg.bucket)),
        IndexKind::Oracle => Box::new(BruteIndex::build(scene)),
    }
}

/// Shape and size counters of an index, dumped as JSON by the CLI.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IndexStats {
    pub kind: String,
    pub live: usize,
    pub node_count: usize,
    pub leaf_count: usize,
    pub depth: usize,
    /// Part count `u` of every internal fast-tree node.
    pub part_counts: Vec<usize>,
    pub kappas: Vec<usize>,
    pub prism_count: usize,
    pub rebuild_events: usize,
    /// Live sizes of the Bentley–Saxe layers (or groups), by slot.
    pub layers: Vec<usize>,
    /// Bytes held in id lists, conflict lists and buckets.
    pub bucket_bytes: usize,
}

impl IndexStats {
    /// Node counts plus bucket bytes, the memory figure reported in timings.
    pub fn memory_bytes(&self) -> usize {
        self.node_count * 64 + self.prism_count * 96 + self.bucket_bytes
    }
}
