//! Deletion-capable fast-query tree built from shallow cuttings.
//!
//! A node over `ν > n₀` members splits them into parts `G_1..G_u`. Part `i`
//! owns a cutting built for the residue `G_i*` at level `ν/t` and keeps the
//! members that cross at most `κ` of its prisms ("good"); the rest move on to
//! the next part. Once the residue is at most `ν/t` it becomes a final part
//! with a trivial cutting. Every prism has a child tree over its conflict
//! list. A counter `χ = ⌈ν/(2t)⌉` counts down deletions reaching the node; at
//! zero the node is rebuilt from its live members.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cutting::{build_cutting_for, Cutting, CuttingConfig};
use crate::geometry::{Aabb, ConvexBody, Homothet, DIST_EPS};
use crate::Id;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FastConfig {
    pub t: f64,
    pub beta: f64,
    pub c_conflict: f64,
    /// Nodes with at most this many members are plain lists.
    pub n0: usize,
    /// Nodes at this tree depth are plain lists.
    pub max_levels: u32,
    /// Octree depth cap of each cutting.
    pub max_depth: u32,
    pub max_prisms: usize,
}

impl Default for FastConfig {
    fn default() -> Self {
        Self { t: 8.0, beta: 4.0, c_conflict: 4.0, n0: 64, max_levels: 3, max_depth: 16, max_prisms: 64 }
    }
}

impl FastConfig {
    pub fn chi(&self, nu: usize) -> usize {
        (nu as f64 / (2.0 * self.t)).ceil().max(1.0) as usize
    }

    pub fn conflict_limit(&self, nu: usize) -> usize {
        (self.c_conflict * nu as f64 / self.t).floor() as usize
    }
}

/// Shared read-only state for tree operations.
#[derive(Clone, Copy)]
pub struct Ctx<'a> {
    pub body: &'a ConvexBody,
    pub store: &'a [Homothet],
    pub cfg: &'a FastConfig,
}

impl Ctx<'_> {
    #[inline]
    fn f(&self, id: Id, x: &[f64; 3]) -> f64 {
        self.body.point_distance(&self.store[id], x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RebuildEvent {
    pub depth: u32,
    /// Size of the node when it was last built.
    pub nu: usize,
    pub chi_initial: usize,
    /// Deletions that reached the node since its last build, this one included.
    pub deletions_seen: usize,
    pub live_after: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RebuildLog {
    pub events: Vec<RebuildEvent>,
}

#[derive(Clone, Debug)]
pub struct FastNode {
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Leaf(Vec<Id>),
    Inner(Box<Inner>),
}

#[derive(Clone, Debug)]
struct Inner {
    nu: usize,
    chi: usize,
    chi_initial: usize,
    deletions_seen: usize,
    depth: u32,
    domain: Aabb,
    /// Live members of this node and the part holding each.
    live: HashMap<Id, u8>,
    parts: Vec<Part>,
}

#[derive(Clone, Debug)]
struct Part {
    /// `G_i` at build time, sorted.
    members: Vec<Id>,
    cutting: Cutting,
    children: Vec<FastNode>,
    /// `L_f`: prisms whose conflict list holds `f`.
    crossings: HashMap<Id, Vec<u32>>,
    kappa: usize,
}

impl FastNode {
    /// Builds a tree over `ids` (sorted) covering queries inside `domain`.
    pub fn build<R: Rng + ?Sized>(ctx: Ctx<'_>, ids: Vec<Id>, domain: Aabb, depth: u32, rng: &mut R) -> FastNode {
        let nu = ids.len();
        if nu <= ctx.cfg.n0 || depth >= ctx.cfg.max_levels {
            return FastNode { kind: Kind::Leaf(ids) };
        }
        let cfg = ctx.cfg;
        let limit = cfg.conflict_limit(nu);
        let mut parts = Vec::new();
        let mut rest = ids.clone();

        while rest.len() as f64 > nu as f64 / cfg.t {
            let nu_i = rest.len();
            let cut_cfg = CuttingConfig {
                t: cfg.t * nu_i as f64 / nu as f64,
                beta: cfg.beta,
                c_conflict: cfg.c_conflict,
                max_depth: cfg.max_depth,
                probe_count: 0,
                max_prisms: cfg.max_prisms,
            };
            let mut cutting = build_cutting_for(ctx.body, ctx.store, &rest, domain, &cut_cfg, rng);
            cutting.conflict_limit = limit;

            let mut count: HashMap<Id, usize> = rest.iter().map(|&j| (j, 0)).collect();
            for p in &cutting.prisms {
                for j in &p.conflict {
                    *count.get_mut(j).expect("conflict ids come from the residue") += 1;
                }
            }
            let total: usize = count.values().sum();
            // twice the average crossing count; at most half the residue exceeds it
            let mut kappa = (2 * total).div_ceil(nu_i).max(1);
            let (good, bad) = loop {
                let (good, bad): (Vec<Id>, Vec<Id>) = rest.iter().partition(|j| count[j] <= kappa);
                if bad.len() <= nu_i / 2 {
                    break (good, bad);
                }
                kappa *= 2;
            };
            parts.push(Part::from_cutting(ctx, cutting, good, kappa, depth, rng));
            rest = bad;
        }
        if !rest.is_empty() {
            let cutting = Cutting::trivial(&rest, domain, limit);
            parts.push(Part::from_cutting(ctx, cutting, rest, usize::MAX, depth, rng));
        }

        let mut live = HashMap::with_capacity(nu);
        for (pi, part) in parts.iter().enumerate() {
            for &j in &part.members {
                live.insert(j, pi as u8);
            }
        }
        let chi = cfg.chi(nu);
        FastNode {
            kind: Kind::Inner(Box::new(Inner {
                nu,
                chi,
                chi_initial: chi,
                deletions_seen: 0,
                depth,
                domain,
                live,
                parts,
            })),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, Kind::Leaf(_))
    }

    pub fn live_count(&self) -> usize {
        match &self.kind {
            Kind::Leaf(items) => items.len(),
            Kind::Inner(n) => n.live.len(),
        }
    }

    /// Some live member intersecting `q`.
    pub fn detect(&self, ctx: Ctx<'_>, q: &Homothet) -> Option<Id> {
        let rho = q.size + DIST_EPS;
        let c0 = &q.center;
        match &self.kind {
            Kind::Leaf(items) => items.iter().copied().find(|&j| ctx.f(j, c0) <= rho),
            Kind::Inner(node) => {
                if !node.domain.contains(c0) {
                    return node.live.keys().copied().filter(|&j| ctx.f(j, c0) <= rho).min();
                }
                for part in &node.parts {
                    let pi = part.cutting.locate(c0).expect("query inside node domain");
                    let prism = &part.cutting.prisms[pi];
                    let ceiling = prism.ceiling_at(ctx.body, ctx.store, c0);
                    if rho >= ceiling {
                        let phi = prism.ceiling.expect("finite ceiling");
                        if node.live.contains_key(&phi) {
                            return Some(phi);
                        }
                        // ghost ceiling: fall back to the prism, then the part
                        let hit = prism
                            .conflict
                            .iter()
                            .copied()
                            .find(|&j| ctx.f(j, c0) <= rho)
                            .or_else(|| node.live_in(part).find(|&j| ctx.f(j, c0) <= rho));
                        if hit.is_some() {
                            return hit;
                        }
                    } else if let Some(hit) = part.children[pi].detect(ctx, q) {
                        return Some(hit);
                    }
                }
                None
            }
        }
    }

    /// Appends every live member intersecting `q`.
    pub fn report(&self, ctx: Ctx<'_>, q: &Homothet, out: &mut Vec<Id>) {
        let rho = q.size + DIST_EPS;
        let c0 = &q.center;
        match &self.kind {
            Kind::Leaf(items) => out.extend(items.iter().copied().filter(|&j| ctx.f(j, c0) <= rho)),
            Kind::Inner(node) => {
                if !node.domain.contains(c0) {
                    out.extend(node.live.keys().copied().filter(|&j| ctx.f(j, c0) <= rho));
                    return;
                }
                for part in &node.parts {
                    let pi = part.cutting.locate(c0).expect("query inside node domain");
                    let prism = &part.cutting.prisms[pi];
                    if rho >= prism.ceiling_at(ctx.body, ctx.store, c0) {
                        // above a ceiling of level about ν/t: the output is that large anyway
                        out.extend(node.live_in(part).filter(|&j| ctx.f(j, c0) <= rho));
                    } else {
                        part.children[pi].report(ctx, q, out);
                    }
                }
            }
        }
    }

    /// Removes `id`, which must be live in this subtree. Returns `true` when
    /// some node on the way was rebuilt.
    pub fn delete<R: Rng + ?Sized>(&mut self, ctx: Ctx<'_>, id: Id, rng: &mut R, log: &mut RebuildLog) -> bool {
        match &mut self.kind {
            Kind::Leaf(items) => {
                if let Some(k) = items.iter().position(|&j| j == id) {
                    items.remove(k);
                }
                false
            }
            Kind::Inner(node) => {
                node.deletions_seen += 1;
                node.chi -= 1;
                if node.chi == 0 {
                    let mut ids: Vec<Id> = node.live.keys().copied().filter(|&j| j != id).collect();
                    ids.sort_unstable();
                    let event = RebuildEvent {
                        depth: node.depth,
                        nu: node.nu,
                        chi_initial: node.chi_initial,
                        deletions_seen: node.deletions_seen,
                        live_after: ids.len(),
                    };
                    let (domain, depth) = (node.domain, node.depth);
                    *self = FastNode::build(ctx, ids, domain, depth, rng);
                    log.events.push(event);
                    return true;
                }
                let Some(pi) = node.live.remove(&id) else {
                    return false;
                };
                let part = &mut node.parts[pi as usize];
                let mut rebuilt = false;
                for prism in part.crossings.remove(&id).unwrap_or_default() {
                    let conflict = &mut part.cutting.prisms[prism as usize].conflict;
                    if let Ok(k) = conflict.binary_search(&id) {
                        conflict.remove(k);
                    }
                    rebuilt |= part.children[prism as usize].delete(ctx, id, rng, log);
                }
                rebuilt
            }
        }
    }

    /// Checks the structural invariants of the subtree:
    /// counter bookkeeping (P1), conflict-list limits (P3), crossing-list
    /// limits (P4), and that every live member sits in exactly one part.
    pub fn audit(&self, cfg: &FastConfig) -> Result<(), String> {
        let Kind::Inner(node) = &self.kind else {
            return Ok(());
        };
        let ctx = format!("node depth {} nu {}", node.depth, node.nu);
        if node.chi_initial != cfg.chi(node.nu) {
            return Err(format!("{ctx}: χ initialised to {} not ⌈ν/2t⌉ = {}", node.chi_initial, cfg.chi(node.nu)));
        }
        if node.chi + node.deletions_seen != node.chi_initial || node.chi == 0 {
            return Err(format!("{ctx}: χ = {} after {} deletions", node.chi, node.deletions_seen));
        }
        let limit = cfg.conflict_limit(node.nu);
        let mut seen = 0;
        for (pi, part) in node.parts.iter().enumerate() {
            for p in &part.cutting.prisms {
                if !p.flagged && p.conflict.len() > limit {
                    return Err(format!("{ctx}: conflict list of {} exceeds {limit}", p.conflict.len()));
                }
            }
            for j in node.live_in(part) {
                seen += 1;
                if node.live[&j] as usize != pi {
                    return Err(format!("{ctx}: member {j} filed under the wrong part"));
                }
                let crossings = part.crossings.get(&j).map_or(0, Vec::len);
                if crossings > part.kappa {
                    return Err(format!("{ctx}: member {j} crosses {crossings} > κ = {} prisms", part.kappa));
                }
            }
            for child in &part.children {
                child.audit(cfg)?;
            }
        }
        if seen != node.live.len() {
            return Err(format!("{ctx}: {} live members but {seen} found in parts", node.live.len()));
        }
        Ok(())
    }

    /// Every node whose counter has not yet fired has seen fewer deletions
    /// than its initial counter.
    pub fn pending_deletions_ok(&self) -> bool {
        match &self.kind {
            Kind::Leaf(_) => true,
            Kind::Inner(node) => {
                node.deletions_seen < node.chi_initial
                    && node.parts.iter().all(|p| p.children.iter().all(FastNode::pending_deletions_ok))
            }
        }
    }

    pub fn stats(&self, acc: &mut super::IndexStats) {
        acc.node_count += 1;
        match &self.kind {
            Kind::Leaf(items) => {
                acc.leaf_count += 1;
                acc.bucket_bytes += items.len() * std::mem::size_of::<Id>();
            }
            Kind::Inner(node) => {
                acc.depth = acc.depth.max(node.depth as usize + 1);
                acc.part_counts.push(node.parts.len());
                for part in &node.parts {
                    if part.kappa != usize::MAX {
                        acc.kappas.push(part.kappa);
                    }
                    acc.prism_count += part.cutting.prisms.len();
                    acc.bucket_bytes += part.cutting.total_conflict() * std::mem::size_of::<Id>()
                        + part.crossings.values().map(Vec::len).sum::<usize>() * 4;
                    for child in &part.children {
                        child.stats(acc);
                    }
                }
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn parts_summary(&self) -> Option<Vec<(usize, usize, bool)>> {
        match &self.kind {
            Kind::Leaf(_) => None,
            Kind::Inner(node) => Some(
                node.parts
                    .iter()
                    .map(|p| (p.members.len(), p.cutting.prisms.len(), p.cutting.is_trivial()))
                    .collect(),
            ),
        }
    }

    /// Ids of all members stored anywhere in the subtree, for audits.
    pub(crate) fn collect_live(&self, out: &mut Vec<Id>) {
        match &self.kind {
            Kind::Leaf(items) => out.extend_from_slice(items),
            Kind::Inner(node) => out.extend(node.live.keys().copied()),
        }
    }

    /// A prism (part index, prism index) whose ceiling function is live, with
    /// the ceiling id, for constructing ghost-ceiling scenarios.
    #[cfg(test)]
    pub(crate) fn root_ceiling(&self) -> Option<(usize, usize, Id)> {
        let Kind::Inner(node) = &self.kind else { return None };
        node.parts.iter().enumerate().find_map(|(pi, part)| {
            part.cutting
                .prisms
                .iter()
                .enumerate()
                .find_map(|(k, p)| p.ceiling.filter(|phi| node.live.contains_key(phi)).map(|phi| (pi, k, phi)))
        })
    }

    #[cfg(test)]
    pub(crate) fn prism_box(&self, part: usize, prism: usize) -> Option<Aabb> {
        match &self.kind {
            Kind::Inner(node) => Some(node.parts[part].cutting.prisms[prism].bbox),
            Kind::Leaf(_) => None,
        }
    }
}

impl Inner {
    fn live_in<'a>(&'a self, part: &'a Part) -> impl Iterator<Item = Id> + 'a {
        part.members.iter().copied().filter(|j| self.live.contains_key(j))
    }
}

impl Part {
    fn from_cutting<R: Rng + ?Sized>(
        ctx: Ctx<'_>,
        mut cutting: Cutting,
        members: Vec<Id>,
        kappa: usize,
        depth: u32,
        rng: &mut R,
    ) -> Part {
        let keep: std::collections::HashSet<Id> = members.iter().copied().collect();
        let mut crossings: HashMap<Id, Vec<u32>> = HashMap::with_capacity(members.len());
        for (k, prism) in cutting.prisms.iter_mut().enumerate() {
            prism.conflict.retain(|j| keep.contains(j));
            for &j in &prism.conflict {
                crossings.entry(j).or_default().push(k as u32);
            }
        }
        let parent_size = members.len();
        let children = cutting
            .prisms
            .iter()
            .map(|prism| {
                let ids = prism.conflict.clone();
                if prism.flagged || (ids.len() >= parent_size && !cutting.is_trivial()) {
                    FastNode { kind: Kind::Leaf(ids) }
                } else {
                    FastNode::build(ctx, ids, prism.bbox, depth + 1, rng)
                }
            })
            .collect();
        Part { members, cutting, children, crossings, kappa }
    }
}
