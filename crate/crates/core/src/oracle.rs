//! Brute-force ground truth for queries and graph algorithms.
//!
//! Everything here is quadratic or worse on purpose; the indexes and graph
//! engine are checked against it.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::geometry::{ConvexBody, Homothet, Point, Scene, DIST_EPS};
use crate::{Error, Id, Result};

pub fn brute_intersections(scene: &Scene, query: &Homothet) -> Vec<Id> {
    scene
        .members()
        .iter()
        .enumerate()
        .filter(|(_, h)| scene.body.intersects(h, query))
        .map(|(i, _)| i)
        .collect()
}

/// Nearest member under the homothet distance; ties go to the smallest id.
pub fn brute_nn(scene: &Scene, query: &Homothet) -> Result<(Id, f64)> {
    nearest(&scene.body, scene.members().iter().copied().enumerate(), query).ok_or(Error::Empty)
}

fn nearest(body: &ConvexBody, members: impl Iterator<Item = (Id, Homothet)>, query: &Homothet) -> Option<(Id, f64)> {
    members
        .map(|(i, h)| (i, body.homothet_distance(&h, query)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
}

/// Number of distance functions strictly below `(c, ρ)`, and the number
/// passing through it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Level {
    pub below: usize,
    pub on: usize,
}

pub fn level_of_point(scene: &Scene, c: &Point, rho: f64) -> Level {
    let mut level = Level { below: 0, on: 0 };
    for h in scene.members() {
        let f = scene.body.point_distance(h, c);
        match f.partial_cmp(&rho) {
            Some(Ordering::Less) => level.below += 1,
            Some(Ordering::Equal) => level.on += 1,
            _ => {}
        }
    }
    level
}

/// Id with the `k`-th smallest `f_i(x)`, `k` counted from 1, ties by id.
pub fn kth_nearest(scene: &Scene, x: &Point, k: usize) -> Result<Id> {
    let n = scene.len();
    if k == 0 || k > n {
        return Err(Error::OutOfRange { index: k, len: n });
    }
    let mut order: Vec<(f64, Id)> = scene
        .members()
        .iter()
        .enumerate()
        .map(|(i, h)| (scene.body.point_distance(h, x), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(order[k - 1].1)
}

/// Expansion radius at which two homothets become externally tangent:
/// `½(dist_K(c, c') - ρ - ρ')`, not clamped.
pub fn tangency_radius(body: &ConvexBody, a: &Homothet, b: &Homothet) -> f64 {
    0.5 * body.homothet_distance(a, b)
}

/// All pairwise tangency radii clamped at 0, sorted ascending, duplicates kept.
pub fn critical_value_multiset(scene: &Scene) -> Vec<f64> {
    let m = scene.members();
    let mut out = Vec::with_capacity(m.len() * m.len().saturating_sub(1) / 2);
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            out.push(tangency_radius(&scene.body, &m[i], &m[j]).max(0.0));
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Sorted distinct critical values; values within `DIST_EPS` merge into the smaller.
pub fn critical_values(scene: &Scene) -> Vec<f64> {
    let mut v = critical_value_multiset(scene);
    v.dedup_by(|later, kept| *later - *kept <= DIST_EPS);
    v
}

/// Number of pairs whose tangency radius is at most `r0`.
pub fn count_critical_leq(scene: &Scene, r0: f64) -> usize {
    let m = scene.members();
    let mut count = 0;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if tangency_radius(&scene.body, &m[i], &m[j]).max(0.0) <= r0 {
                count += 1;
            }
        }
    }
    count
}

/// Explicit proximity graph: `(i, j)` is an edge iff
/// `homothet_distance(K_i, K_j) ≤ r0` (up to [`DIST_EPS`]).
#[derive(Clone, Debug)]
pub struct AdjacencyOracle {
    pub r0: f64,
    /// Sorted neighbor lists with edge weights.
    adjacency: Vec<Vec<(Id, f64)>>,
}

impl AdjacencyOracle {
    pub fn build(scene: &Scene, r0: f64) -> Self {
        let m = scene.members();
        let mut adjacency = vec![Vec::new(); m.len()];
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                let d = scene.body.homothet_distance(&m[i], &m[j]);
                if d <= r0 + DIST_EPS {
                    adjacency[i].push((j, d));
                    adjacency[j].push((i, d));
                }
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|e| e.0);
        }
        Self { r0, adjacency }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: Id) -> impl Iterator<Item = Id> + '_ {
        self.adjacency[v].iter().map(|e| e.0)
    }

    pub fn weighted_neighbors(&self, v: Id) -> &[(Id, f64)] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: Id, v: Id) -> bool {
        self.adjacency[u].binary_search_by_key(&v, |e| e.0).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Textbook BFS; frontier vertices are expanded in increasing id order.
    pub fn bfs(&self, source: Id) -> (Vec<Vec<Id>>, Vec<Option<Id>>) {
        self.bfs_bounded(source, usize::MAX)
    }

    /// BFS stopped after `max_hops` layers beyond the source.
    pub fn bfs_bounded(&self, source: Id, max_hops: usize) -> (Vec<Vec<Id>>, Vec<Option<Id>>) {
        let n = self.len();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[source] = true;
        let mut layers = vec![vec![source]];
        while layers.len() <= max_hops {
            let mut next = Vec::new();
            for &u in layers.last().unwrap() {
                for v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        parent[v] = Some(u);
                        next.push(v);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            layers.push(next);
        }
        (layers, parent)
    }

    pub fn hop_distance(&self, source: Id, target: Id, max_hops: usize) -> Option<usize> {
        let (layers, _) = self.bfs_bounded(source, max_hops);
        layers.iter().position(|l| l.binary_search(&target).is_ok())
    }

    /// Textbook Dijkstra over the edge weights.
    pub fn dijkstra(&self, source: Id) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Item(f64, Id);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Item {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        let mut dist = vec![f64::INFINITY; self.len()];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::from([Item(0.0, source)]);
        while let Some(Item(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adjacency[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Item(nd, v));
                }
            }
        }
        dist
    }

    /// Kruskal; returns the forest edges and total weight.
    pub fn kruskal(&self) -> (Vec<(Id, Id)>, f64) {
        let mut edges: Vec<(f64, Id, Id)> = (0..self.len())
            .flat_map(|u| self.adjacency[u].iter().filter(move |e| e.0 > u).map(move |&(v, w)| (w, u, v)))
            .collect();
        edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        let mut dsu = Dsu::new(self.len());
        let mut forest = Vec::new();
        let mut total = 0.0;
        for (w, u, v) in edges {
            if dsu.union(u, v) {
                forest.push((u, v));
                total += w;
            }
        }
        (forest, total)
    }

    pub fn component_count(&self) -> usize {
        let mut dsu = Dsu::new(self.len());
        for u in 0..self.len() {
            for v in self.neighbors(u) {
                dsu.union(u, v);
            }
        }
        (0..self.len()).filter(|&v| dsu.find(v) == v).count()
    }

    /// Checks that `parents`/`order` describe a depth-first forest of this graph:
    /// the order is a preorder of the forest, tree edges are graph edges, and
    /// every graph edge joins an ancestor to a descendant.
    pub fn validate_dfs(&self, parents: &[Option<Id>], order: &[Id]) -> std::result::Result<(), String> {
        let n = self.len();
        if order.len() != n || parents.len() != n {
            return Err(format!("forest covers {} of {n} vertices", order.len()));
        }
        let mut pre = vec![usize::MAX; n];
        for (k, &v) in order.iter().enumerate() {
            if pre[v] != usize::MAX {
                return Err(format!("vertex {v} discovered twice"));
            }
            pre[v] = k;
        }
        // preorder consistency
        let mut stack: Vec<Id> = Vec::new();
        for &v in order {
            match parents[v] {
                None => stack.clear(),
                Some(p) => {
                    if !self.has_edge(p, v) {
                        return Err(format!("tree edge ({p},{v}) is not a graph edge"));
                    }
                    while stack.last().is_some_and(|&top| top != p) {
                        stack.pop();
                    }
                    if stack.is_empty() {
                        return Err(format!("parent {p} of {v} is not on the active path"));
                    }
                }
            }
            stack.push(v);
        }
        let mut size = vec![1usize; n];
        for &v in order.iter().rev() {
            if let Some(p) = parents[v] {
                size[p] += size[v];
            }
        }
        let is_ancestor = |a: Id, d: Id| pre[a] <= pre[d] && pre[d] < pre[a] + size[a];
        for u in 0..n {
            for v in self.neighbors(u) {
                if u < v && !is_ancestor(u, v) && !is_ancestor(v, u) {
                    return Err(format!("cross edge ({u},{v}) violates the white-path property"));
                }
            }
        }
        Ok(())
    }
}

/// Union-find with path halving.
#[derive(Clone, Debug)]
pub struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Live set kept alongside a dynamic index, answering every query by scan.
#[derive(Clone, Debug)]
pub struct ScratchOracle {
    pub body: ConvexBody,
    members: Vec<Option<Homothet>>,
}

impl ScratchOracle {
    pub fn new(scene: &Scene) -> Self {
        Self { body: scene.body.clone(), members: scene.members().iter().copied().map(Some).collect() }
    }

    pub fn insert(&mut self, h: Homothet) -> Id {
        self.members.push(Some(h));
        self.members.len() - 1
    }

    pub fn delete(&mut self, id: Id) -> Result<()> {
        match self.members.get_mut(id) {
            None => Err(Error::UnknownId(id)),
            Some(None) => Err(Error::AlreadyDeleted(id)),
            Some(slot) => {
                *slot = None;
                Ok(())
            }
        }
    }

    pub fn live(&self) -> impl Iterator<Item = (Id, Homothet)> + '_ {
        self.members.iter().enumerate().filter_map(|(i, h)| h.map(|h| (i, h)))
    }

    pub fn live_ids(&self) -> Vec<Id> {
        self.live().map(|(i, _)| i).collect()
    }

    pub fn intersections(&self, query: &Homothet) -> Vec<Id> {
        self.live().filter(|(_, h)| self.body.intersects(h, query)).map(|(i, _)| i).collect()
    }

    pub fn nn(&self, query: &Homothet) -> Result<(Id, f64)> {
        nearest(&self.body, self.live(), query).ok_or(Error::Empty)
    }
}

/// Connected components by BFS over an oracle graph, each sorted.
pub fn components(adj: &AdjacencyOracle) -> Vec<Vec<Id>> {
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in adj.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}
