//! Linear-size pruning tree over the points `(c, ρ)` of R⁴.
//!
//! A member intersects the query `K(c₀, ρ₀)` exactly when
//! `dist_K(c₀, c) ≤ ρ₀ + ρ`. A node stores the bounding box of its centers
//! and the range `[ρ_lo, ρ_hi]` of its sizes, so the whole subtree can be
//! skipped when `min dist_K(c₀, box) > ρ₀ + ρ_hi` and taken wholesale when
//! `max dist_K(c₀, box) ≤ ρ₀ + ρ_lo`.

use std::sync::atomic::{AtomicU64, Ordering};

use super::{IndexStats, ProximityIndex};
use crate::geometry::{Aabb, ConvexBody, Homothet, Scene, DIST_EPS};
use crate::{Error, Id, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug)]
pub struct LinearIndex {
    body: ConvexBody,
    store: Vec<Homothet>,
    live: Vec<bool>,
    live_count: usize,
    bucket: usize,
    nodes: Vec<Node>,
    /// Ids of the tree, permuted so every subtree is a contiguous run.
    perm: Vec<Id>,
    /// Leaf holding each id, `NONE` for pending inserts.
    leaf_of: Vec<u32>,
    /// Inserted since the last rebuild; scanned linearly.
    pending: Vec<Id>,
    built_size: usize,
    visited: AtomicU64,
    rebuilds: usize,
}

#[derive(Clone, Debug)]
struct Node {
    bbox: Aabb,
    rho_lo: f64,
    rho_hi: f64,
    start: u32,
    end: u32,
    live: u32,
    parent: u32,
    left: u32,
    right: u32,
}

impl Node {
    fn is_leaf(&self) -> bool {
        self.left == NONE
    }
}

impl Clone for LinearIndex {
    fn clone(&self) -> Self {
        Self {
            body: self.body.clone(),
            store: self.store.clone(),
            live: self.live.clone(),
            live_count: self.live_count,
            bucket: self.bucket,
            nodes: self.nodes.clone(),
            perm: self.perm.clone(),
            leaf_of: self.leaf_of.clone(),
            pending: self.pending.clone(),
            built_size: self.built_size,
            visited: AtomicU64::new(self.visited.load(Ordering::Relaxed)),
            rebuilds: self.rebuilds,
        }
    }
}

impl LinearIndex {
    pub fn new(body: ConvexBody, bucket: usize) -> Self {
        Self {
            body,
            store: Vec::new(),
            live: Vec::new(),
            live_count: 0,
            bucket: bucket.max(1),
            nodes: Vec::new(),
            perm: Vec::new(),
            leaf_of: Vec::new(),
            pending: Vec::new(),
            built_size: 0,
            visited: AtomicU64::new(0),
            rebuilds: 0,
        }
    }

    pub fn build(scene: &Scene, bucket: usize) -> Self {
        let mut index = Self::new(scene.body.clone(), bucket);
        index.store = scene.members().to_vec();
        index.live = vec![true; scene.len()];
        index.live_count = scene.len();
        index.leaf_of = vec![NONE; scene.len()];
        index.rebuild();
        index
    }

    /// Tree height, counting a lone leaf as 1.
    pub fn height(&self) -> usize {
        fn h(nodes: &[Node], v: u32) -> usize {
            let n = &nodes[v as usize];
            if n.is_leaf() {
                1
            } else {
                1 + h(nodes, n.left).max(h(nodes, n.right))
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            h(&self.nodes, 0)
        }
    }

    /// Nodes and pending members touched by queries since the last reset.
    pub fn visited(&self) -> u64 {
        self.visited.load(Ordering::Relaxed)
    }

    pub fn reset_visited(&self) {
        self.visited.store(0, Ordering::Relaxed);
    }

    pub fn rebuild_count(&self) -> usize {
        self.rebuilds
    }

    fn rebuild(&mut self) {
        self.perm = (0..self.store.len()).filter(|&j| self.live[j]).collect();
        self.pending.clear();
        self.nodes.clear();
        self.leaf_of.iter_mut().for_each(|l| *l = NONE);
        self.built_size = self.perm.len();
        self.rebuilds += 1;
        if !self.perm.is_empty() {
            self.build_node(0, self.perm.len(), NONE);
        }
    }

    fn build_node(&mut self, start: usize, end: usize, parent: u32) -> u32 {
        let ids = &mut self.perm[start..end];
        let store = &self.store;
        let bbox = Aabb::enclosing(ids.iter().map(|&j| store[j].center)).expect("non-empty run");
        let (rho_lo, rho_hi) =
            ids.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &j| (a.min(store[j].size), b.max(store[j].size)));
        let v = self.nodes.len() as u32;
        self.nodes.push(Node {
            bbox,
            rho_lo,
            rho_hi,
            start: start as u32,
            end: end as u32,
            live: (end - start) as u32,
            parent,
            left: NONE,
            right: NONE,
        });
        if end - start <= self.bucket {
            for &j in &self.perm[start..end] {
                self.leaf_of[j] = v;
            }
            return v;
        }
        // split the longest of the four axes at the median
        let e = bbox.extent();
        let (axis, _) = e
            .iter()
            .copied()
            .chain(std::iter::once(rho_hi - rho_lo))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, w)| if w > best.1 { (k, w) } else { best });
        let key = |j: &Id| if axis < 3 { store[*j].center[axis] } else { store[*j].size };
        let mid = (end - start) / 2;
        ids.select_nth_unstable_by(mid, |a, b| key(a).total_cmp(&key(b)));
        let left = self.build_node(start, start + mid, v);
        let right = self.build_node(start + mid, end, v);
        let node = &mut self.nodes[v as usize];
        node.left = left;
        node.right = right;
        v
    }

    fn bounds(&self, node: &Node, c0: &[f64; 3]) -> (f64, f64) {
        (self.body.min_dist_to_box(c0, &node.bbox), self.body.max_dist_to_box(c0, &node.bbox))
    }

    fn first_live(&self, v: u32) -> Option<Id> {
        let n = &self.nodes[v as usize];
        self.perm[n.start as usize..n.end as usize].iter().copied().find(|&j| self.live[j])
    }

    fn search(&self, query: &Homothet, out: &mut Option<&mut Vec<Id>>) -> Option<Id> {
        let rho = query.size + DIST_EPS;
        let c0 = &query.center;
        let mut visited = 0u64;
        let mut found = None;
        let mut stack = if self.nodes.is_empty() { vec![] } else { vec![0u32] };
        while let Some(v) = stack.pop() {
            visited += 1;
            let n = &self.nodes[v as usize];
            if n.live == 0 {
                continue;
            }
            let (lo, hi) = self.bounds(n, c0);
            if lo > rho + n.rho_hi {
                continue;
            }
            let run = &self.perm[n.start as usize..n.end as usize];
            if hi <= rho + n.rho_lo {
                match out {
                    Some(out) => out.extend(run.iter().copied().filter(|&j| self.live[j])),
                    None => {
                        found = self.first_live(v);
                        break;
                    }
                }
            } else if n.is_leaf() {
                visited += run.len() as u64;
                let mut hits = run
                    .iter()
                    .copied()
                    .filter(|&j| self.live[j] && self.body.point_distance(&self.store[j], c0) <= rho);
                match out {
                    Some(out) => out.extend(hits),
                    None => {
                        if let Some(j) = hits.next() {
                            found = Some(j);
                            break;
                        }
                    }
                }
            } else {
                stack.push(n.right);
                stack.push(n.left);
            }
        }
        if found.is_none() {
            visited += self.pending.len() as u64;
            let mut hits = self
                .pending
                .iter()
                .copied()
                .filter(|&j| self.live[j] && self.body.point_distance(&self.store[j], c0) <= rho);
            match out {
                Some(out) => out.extend(hits),
                None => found = hits.next(),
            }
        }
        self.visited.fetch_add(visited, Ordering::Relaxed);
        found
    }

    /// Checks live counters, leaf membership and the height bound.
    pub fn audit(&self) -> std::result::Result<(), String> {
        for (v, n) in self.nodes.iter().enumerate() {
            let live = self.perm[n.start as usize..n.end as usize].iter().filter(|&&j| self.live[j]).count();
            if live != n.live as usize {
                return Err(format!("node {v}: counter {} but {live} live", n.live));
            }
        }
        for (k, &j) in self.perm.iter().enumerate() {
            let leaf = &self.nodes[self.leaf_of[j] as usize];
            if !(leaf.is_leaf() && (leaf.start as usize..leaf.end as usize).contains(&k)) {
                return Err(format!("member {j} not in its recorded leaf"));
            }
        }
        if self.built_size > 0 {
            let bound = (self.built_size as f64 / self.bucket as f64).log2().ceil().max(0.0) as usize + 2;
            if self.height() > bound {
                return Err(format!("height {} exceeds {bound}", self.height()));
            }
        }
        Ok(())
    }
}

impl ProximityIndex for LinearIndex {
    fn body(&self) -> &ConvexBody {
        &self.body
    }

    fn len(&self) -> usize {
        self.live_count
    }

    fn is_live(&self, id: Id) -> bool {
        self.live.get(id).copied().unwrap_or(false)
    }

    fn homothet(&self, id: Id) -> Option<&Homothet> {
        self.store.get(id)
    }

    fn any_live(&self) -> Option<Id> {
        self.live.iter().position(|&l| l)
    }

    fn detect(&self, query: &Homothet) -> Option<Id> {
        self.search(query, &mut None)
    }

    fn report(&self, query: &Homothet) -> Vec<Id> {
        let mut out = Vec::new();
        self.search(query, &mut Some(&mut out));
        out.sort_unstable();
        out
    }

    fn delete(&mut self, id: Id) -> Result<()> {
        match self.live.get(id) {
            None => return Err(Error::UnknownId(id)),
            Some(false) => return Err(Error::AlreadyDeleted(id)),
            Some(true) => {}
        }
        self.live[id] = false;
        self.live_count -= 1;
        let mut v = self.leaf_of[id];
        if v == NONE {
            self.pending.retain(|&j| j != id);
        }
        while v != NONE {
            let n = &mut self.nodes[v as usize];
            n.live -= 1;
            v = n.parent;
        }
        if 2 * self.live_count < self.built_size {
            self.rebuild();
        }
        Ok(())
    }

    fn insert(&mut self, h: Homothet) -> Id {
        let id = self.store.len();
        self.store.push(h);
        self.live.push(true);
        self.leaf_of.push(NONE);
        self.live_count += 1;
        self.pending.push(id);
        // pending members cost a scan per query; keep them at O(√n)
        let limit = self.bucket.max(4 * (self.live_count as f64).sqrt() as usize);
        if self.pending.len() > limit {
            self.rebuild();
        }
        id
    }

    fn stats(&self) -> IndexStats {
        IndexStats {
            kind: "linear".into(),
            live: self.live_count,
            node_count: self.nodes.len(),
            leaf_count: self.nodes.iter().filter(|n| n.is_leaf()).count(),
            depth: self.height(),
            rebuild_events: self.rebuilds.saturating_sub(1),
            bucket_bytes: (self.perm.len() + self.pending.len()) * std::mem::size_of::<Id>(),
            ..IndexStats::default()
        }
    }
}
