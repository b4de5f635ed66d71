use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fast::{Ctx, FastConfig, FastNode, RebuildLog};
use super::{IndexStats, ProximityIndex};
use crate::geometry::{Aabb, DEFAULT_MARGIN, ConvexBody, Homothet, Scene};
use crate::{Error, Id, Result};

/// Fast-query trees over consecutive groups of `g` members.
///
/// Storage is about `(n/g)·g³ = n·g²` against query time `(n/g)·log g`.
/// An insertion rebuilds the last group, or opens a new one once it is full.
#[derive(Clone, Debug)]
pub struct GroupedIndex {
    body: ConvexBody,
    store: Vec<Homothet>,
    live: Vec<bool>,
    group_of: Vec<usize>,
    groups: Vec<Group>,
    g: usize,
    cfg: FastConfig,
    rng: ChaCha8Rng,
    universe: Aabb,
    live_count: usize,
    log: RebuildLog,
}

#[derive(Clone, Debug)]
struct Group {
    tree: FastNode,
    built: Vec<Id>,
    live: usize,
}

impl GroupedIndex {
    pub fn new(body: ConvexBody, g: usize, cfg: FastConfig, seed: u64) -> Self {
        Self {
            body,
            store: Vec::new(),
            live: Vec::new(),
            group_of: Vec::new(),
            groups: Vec::new(),
            g: g.max(1),
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            universe: Aabb::new([-1.0; 3], [1.0; 3]),
            live_count: 0,
            log: RebuildLog::default(),
        }
    }

    pub fn build(scene: &Scene, g: usize, cfg: FastConfig, seed: u64) -> Self {
        let mut index = Self::new(scene.body.clone(), g, cfg, seed);
        let n = scene.len();
        index.store = scene.members().to_vec();
        index.live = vec![true; n];
        index.group_of = vec![0; n];
        index.live_count = n;
        if n > 0 {
            index.universe = *scene.domain();
        }
        let g = index.g;
        for start in (0..n).step_by(g) {
            let ids: Vec<Id> = (start..(start + g).min(n)).collect();
            index.push_group(ids);
        }
        index
    }

    pub fn group_size(&self) -> usize {
        self.g
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn rebuild_log(&self) -> &RebuildLog {
        &self.log
    }

    fn ctx(&self) -> Ctx<'_> {
        Ctx { body: &self.body, store: &self.store, cfg: &self.cfg }
    }

    fn make_group(&mut self, ids: Vec<Id>) -> Group {
        let ctx = Ctx { body: &self.body, store: &self.store, cfg: &self.cfg };
        let tree = FastNode::build(ctx, ids.clone(), self.universe, 0, &mut self.rng);
        Group { tree, live: ids.len(), built: ids }
    }

    fn push_group(&mut self, ids: Vec<Id>) {
        let k = self.groups.len();
        for &j in &ids {
            self.group_of[j] = k;
        }
        let group = self.make_group(ids);
        self.groups.push(group);
    }

    pub fn audit(&self) -> std::result::Result<(), String> {
        for (k, group) in self.groups.iter().enumerate() {
            group.tree.audit(&self.cfg).map_err(|e| format!("group {k}: {e}"))?;
            if group.built.len() > self.g {
                return Err(format!("group {k} holds {} > g = {}", group.built.len(), self.g));
            }
        }
        Ok(())
    }
}

impl ProximityIndex for GroupedIndex {
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
        let ctx = self.ctx();
        self.groups.iter().filter(|g| g.live > 0).find_map(|g| g.tree.detect(ctx, query))
    }

    fn report(&self, query: &Homothet) -> Vec<Id> {
        let ctx = self.ctx();
        let mut out = Vec::new();
        for g in self.groups.iter().filter(|g| g.live > 0) {
            g.tree.report(ctx, query, &mut out);
        }
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
        let ctx = Ctx { body: &self.body, store: &self.store, cfg: &self.cfg };
        let group = &mut self.groups[self.group_of[id]];
        group.tree.delete(ctx, id, &mut self.rng, &mut self.log);
        group.live -= 1;
        Ok(())
    }

    fn insert(&mut self, h: Homothet) -> Id {
        let id = self.store.len();
        self.store.push(h);
        self.live.push(true);
        self.group_of.push(0);
        self.live_count += 1;
        let pad = h.size + DEFAULT_MARGIN;
        self.universe = if self.live_count == 1 {
            Aabb::point(h.center).expanded(pad.max(1.0))
        } else {
            self.universe.union(&Aabb::point(h.center).expanded(pad))
        };
        match self.groups.last() {
            Some(last) if last.built.len() < self.g => {
                let k = self.groups.len() - 1;
                let mut ids: Vec<Id> = last.built.iter().copied().filter(|&j| self.live[j]).collect();
                ids.push(id);
                self.group_of[id] = k;
                self.groups[k] = self.make_group(ids);
            }
            _ => self.push_group(vec![id]),
        }
        id
    }

    fn stats(&self) -> IndexStats {
        let mut s = IndexStats { kind: "grouped".into(), live: self.live_count, ..IndexStats::default() };
        for g in &self.groups {
            g.tree.stats(&mut s);
            s.layers.push(g.live);
        }
        s.rebuild_events = self.log.events.len();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use crate::oracle::ScratchOracle;
    use rand::Rng;

    #[test]
    fn groups_agree_with_scratch_oracle() {
        let s = generate(&GeneratorSpec { n: 300, seed: 8, ..GeneratorSpec::default() }).unwrap();
        let mut idx = GroupedIndex::build(&s, 70, FastConfig::default(), 3);
        assert_eq!(idx.group_count(), 5);
        let mut oracle = ScratchOracle::new(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = *s.domain();
        for step in 0..400 {
            let c = std::array::from_fn(|k| rng.random_range(d.lo[k]..d.hi[k]));
            if step % 4 == 0 {
                let h = Homothet::new(c, 0.7);
                assert_eq!(idx.insert(h), oracle.insert(h));
            } else if step % 4 == 1 {
                let live = oracle.live_ids();
                let id = live[rng.random_range(0..live.len())];
                idx.delete(id).unwrap();
                oracle.delete(id).unwrap();
            } else {
                let q = Homothet::new(c, rng.random_range(0.0..2.5));
                assert_eq!(idx.report(&q), oracle.intersections(&q));
            }
        }
        idx.audit().unwrap();
    }
}
