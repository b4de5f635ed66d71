use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fast::{Ctx, FastConfig, FastNode, RebuildLog};
use super::{IndexStats, ProximityIndex};
use crate::geometry::{Aabb, DEFAULT_MARGIN, ConvexBody, Homothet, Scene};
use crate::{Error, Id, Result};

/// Fast-query trees made insertable with the logarithmic method.
///
/// Slot `j` holds at most `2^j` members. An insertion carries a singleton
/// through the occupied low slots, absorbing their live members, and
/// rebuilds the merged set in the first empty slot. Deletions go to the
/// tree of the slot holding the member.
#[derive(Clone, Debug)]
pub struct FastIndex {
    body: ConvexBody,
    store: Vec<Homothet>,
    live: Vec<bool>,
    slot_of: Vec<usize>,
    layers: Vec<Option<Layer>>,
    cfg: FastConfig,
    rng: ChaCha8Rng,
    universe: Aabb,
    live_count: usize,
    log: RebuildLog,
}

#[derive(Clone, Debug)]
struct Layer {
    tree: FastNode,
    tombstones: HashSet<Id>,
    built: Vec<Id>,
}

impl Layer {
    fn live(&self) -> impl Iterator<Item = Id> + '_ {
        self.built.iter().copied().filter(|j| !self.tombstones.contains(j))
    }

    fn live_len(&self) -> usize {
        self.built.len() - self.tombstones.len()
    }
}

impl FastIndex {
    pub fn new(body: ConvexBody, cfg: FastConfig, seed: u64) -> Self {
        Self {
            body,
            store: Vec::new(),
            live: Vec::new(),
            slot_of: Vec::new(),
            layers: Vec::new(),
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            universe: Aabb::new([-1.0; 3], [1.0; 3]),
            live_count: 0,
            log: RebuildLog::default(),
        }
    }

    /// All members in a single layer.
    pub fn build(scene: &Scene, cfg: FastConfig, seed: u64) -> Self {
        let mut index = Self::new(scene.body.clone(), cfg, seed);
        let n = scene.len();
        if n == 0 {
            return index;
        }
        index.store = scene.members().to_vec();
        index.live = vec![true; n];
        index.live_count = n;
        index.universe = *scene.domain();
        let slot = n.next_power_of_two().trailing_zeros() as usize;
        index.slot_of = vec![slot; n];
        index.place(slot, (0..n).collect());
        index
    }

    fn place(&mut self, slot: usize, ids: Vec<Id>) {
        if self.layers.len() <= slot {
            self.layers.resize_with(slot + 1, || None);
        }
        for &j in &ids {
            self.slot_of[j] = slot;
        }
        let ctx = Ctx { body: &self.body, store: &self.store, cfg: &self.cfg };
        let tree = FastNode::build(ctx, ids.clone(), self.universe, 0, &mut self.rng);
        self.layers[slot] = Some(Layer { tree, tombstones: HashSet::new(), built: ids });
    }

    fn ctx(&self) -> Ctx<'_> {
        Ctx { body: &self.body, store: &self.store, cfg: &self.cfg }
    }

    pub fn config(&self) -> &FastConfig {
        &self.cfg
    }

    pub fn rebuild_log(&self) -> &RebuildLog {
        &self.log
    }

    /// Live size of every slot.
    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.as_ref().map_or(0, Layer::live_len)).collect()
    }

    /// Structural audit of every layer tree plus the layer bookkeeping.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let mut seen = Vec::new();
        for (slot, layer) in self.layers.iter().enumerate() {
            let Some(layer) = layer else { continue };
            layer.tree.audit(&self.cfg).map_err(|e| format!("slot {slot}: {e}"))?;
            if !layer.tree.pending_deletions_ok() {
                return Err(format!("slot {slot}: a counter overran without a rebuild"));
            }
            let mut in_tree = Vec::new();
            layer.tree.collect_live(&mut in_tree);
            in_tree.sort_unstable();
            let mut expected: Vec<Id> = layer.live().collect();
            expected.sort_unstable();
            if in_tree != expected {
                return Err(format!("slot {slot}: tree holds {} live ids, layer {}", in_tree.len(), expected.len()));
            }
            seen.extend(expected);
        }
        seen.sort_unstable();
        let live: Vec<Id> = (0..self.store.len()).filter(|&j| self.live[j]).collect();
        if seen != live {
            return Err(format!("layers hold {} live ids, index {}", seen.len(), live.len()));
        }
        Ok(())
    }

    pub(crate) fn layer_trees(&self) -> impl Iterator<Item = &FastNode> {
        self.layers.iter().flatten().map(|l| &l.tree)
    }
}

impl ProximityIndex for FastIndex {
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
        self.layers.iter().flatten().find_map(|l| l.tree.detect(ctx, query))
    }

    fn report(&self, query: &Homothet) -> Vec<Id> {
        let ctx = self.ctx();
        let mut out = Vec::new();
        for layer in self.layers.iter().flatten() {
            layer.tree.report(ctx, query, &mut out);
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
        let slot = self.slot_of[id];
        let ctx = Ctx { body: &self.body, store: &self.store, cfg: &self.cfg };
        let layer = self.layers[slot].as_mut().expect("live member has a layer");
        layer.tree.delete(ctx, id, &mut self.rng, &mut self.log);
        layer.tombstones.insert(id);
        if layer.live_len() == 0 {
            self.layers[slot] = None;
        }
        Ok(())
    }

    fn insert(&mut self, h: Homothet) -> Id {
        let id = self.store.len();
        self.store.push(h);
        self.live.push(true);
        self.slot_of.push(0);
        self.live_count += 1;
        let pad = h.size + DEFAULT_MARGIN;
        self.universe = self.universe.union(&Aabb::point(h.center).expanded(pad));
        if self.live_count == 1 {
            self.universe = Aabb::point(h.center).expanded(pad.max(1.0));
        }

        let mut carry = vec![id];
        let mut slot = 0;
        while let Some(Some(layer)) = self.layers.get_mut(slot).map(Option::take) {
            carry.extend(layer.live());
            slot += 1;
        }
        carry.sort_unstable();
        self.place(slot, carry);
        id
    }

    fn stats(&self) -> IndexStats {
        let mut s = IndexStats { kind: "fast".into(), live: self.live_count, ..IndexStats::default() };
        for tree in self.layer_trees() {
            tree.stats(&mut s);
        }
        s.rebuild_events = self.log.events.len();
        s.layers = self.layer_sizes();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec, SizeLaw};
    use crate::oracle::{brute_intersections, ScratchOracle};

    fn scene(n: usize, seed: u64) -> Scene {
        generate(&GeneratorSpec {
            n,
            seed,
            size_law: SizeLaw::Uniform { lo: 0.1, hi: 1.2 },
            extent: 15.0,
            ..GeneratorSpec::default()
        })
        .unwrap()
    }

    #[test]
    fn empty_index_detects_nothing() {
        let idx = FastIndex::new(ConvexBody::euclidean(), FastConfig::default(), 0);
        assert_eq!(idx.detect(&Homothet::new([0.0; 3], 5.0)), None);
        assert!(idx.nn(&Homothet::point([0.0; 3])).is_err());
    }

    #[test]
    fn logarithmic_method_layer_sizes() {
        let mut idx = FastIndex::new(ConvexBody::euclidean(), FastConfig::default(), 1);
        idx.insert(Homothet::new([0.0; 3], 1.0));
        assert_eq!(idx.layer_sizes(), vec![1]);
        for k in 1..37usize {
            idx.insert(Homothet::new([k as f64, 0.0, (k % 5) as f64], 0.5));
            let count = k + 1;
            let sizes = idx.layer_sizes();
            for (slot, &s) in sizes.iter().enumerate() {
                let bit = count >> slot & 1;
                assert_eq!(s, bit << slot, "count {count} slot {slot}");
            }
        }
        idx.audit().unwrap();
    }

    #[test]
    fn queries_match_brute_force_after_deletions() {
        let s = scene(500, 4);
        let mut idx = FastIndex::build(&s, FastConfig::default(), 7);
        idx.audit().unwrap();
        let mut oracle = ScratchOracle::new(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        use rand::Rng;
        for _ in 0..100 {
            let live = oracle.live_ids();
            let id = live[rng.random_range(0..live.len())];
            idx.delete(id).unwrap();
            oracle.delete(id).unwrap();
        }
        idx.audit().unwrap();
        let d = *s.domain();
        for _ in 0..1000 {
            let q = Homothet::new(
                std::array::from_fn(|k| rng.random_range(d.lo[k]..d.hi[k])),
                rng.random_range(0.0..2.0),
            );
            let truth = oracle.intersections(&q);
            match idx.detect(&q) {
                Some(w) => {
                    assert!(idx.is_live(w) && s.body.intersects(&s.members()[w], &q));
                }
                None => assert!(truth.is_empty()),
            }
            assert_eq!(idx.report(&q), truth);
        }
        assert!(brute_intersections(&s, &s.members()[0]).contains(&0));
    }
}
