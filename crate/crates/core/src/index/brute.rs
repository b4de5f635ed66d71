use super::{IndexStats, ProximityIndex};
use crate::geometry::{ConvexBody, Homothet, Scene};
use crate::{Error, Id, Result};

/// Exhaustive scan over a store with a live mask.
#[derive(Clone, Debug)]
pub struct BruteIndex {
    body: ConvexBody,
    store: Vec<Homothet>,
    live: Vec<bool>,
    live_count: usize,
}

impl BruteIndex {
    pub fn new(body: ConvexBody) -> Self {
        Self { body, store: Vec::new(), live: Vec::new(), live_count: 0 }
    }

    pub fn build(scene: &Scene) -> Self {
        Self {
            body: scene.body.clone(),
            store: scene.members().to_vec(),
            live: vec![true; scene.len()],
            live_count: scene.len(),
        }
    }

    fn live_ids(&self) -> impl Iterator<Item = Id> + '_ {
        (0..self.store.len()).filter(|&j| self.live[j])
    }
}

impl ProximityIndex for BruteIndex {
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
        self.live_ids().next()
    }

    fn detect(&self, query: &Homothet) -> Option<Id> {
        self.live_ids().find(|&j| self.body.intersects(&self.store[j], query))
    }

    fn report(&self, query: &Homothet) -> Vec<Id> {
        self.live_ids().filter(|&j| self.body.intersects(&self.store[j], query)).collect()
    }

    fn delete(&mut self, id: Id) -> Result<()> {
        match self.live.get(id) {
            None => Err(Error::UnknownId(id)),
            Some(false) => Err(Error::AlreadyDeleted(id)),
            Some(true) => {
                self.live[id] = false;
                self.live_count -= 1;
                Ok(())
            }
        }
    }

    fn insert(&mut self, h: Homothet) -> Id {
        self.store.push(h);
        self.live.push(true);
        self.live_count += 1;
        self.store.len() - 1
    }

    fn nn(&self, query: &Homothet) -> Result<(Id, f64)> {
        self.live_ids()
            .map(|j| (j, self.body.homothet_distance(query, &self.store[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .ok_or(Error::Empty)
    }

    fn stats(&self) -> IndexStats {
        IndexStats {
            kind: "oracle".into(),
            live: self.live_count,
            node_count: 1,
            leaf_count: 1,
            bucket_bytes: self.store.len() * std::mem::size_of::<Homothet>(),
            ..IndexStats::default()
        }
    }
}
