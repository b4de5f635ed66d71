//! Additively weighted bichromatic closest pair under blue→red moves.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::geometry::{ConvexBody, Homothet, Scene};
use crate::index::{build_index, DynIndex, IndexConfig};
use crate::{Error, Id, Result};

/// A red member: its homothet and additive weight `ω ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Red {
    pub weight: f64,
    /// Nearest blue and the pair value, when known.
    cache: Option<(Id, f64)>,
    dirty: bool,
    version: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Entry {
    value: f64,
    red: Id,
    version: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (value, red id)
        other.value.total_cmp(&self.value).then(other.red.cmp(&self.red))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Closest pair between red members `V` (weighted) and blue members `U`.
///
/// The pair value is `dist_K(p, q) + ω(p)`, evaluated as the homothet
/// distance between `K_p = K(p, A − ω(p))` and `q`, plus `A`. Blues sit in a
/// proximity index; each red caches its nearest blue. Moving a blue to the
/// red side marks only the reds caching it, which are recomputed when they
/// surface at the top of the heap.
pub struct BcpState {
    body: ConvexBody,
    members: Vec<Homothet>,
    blue: DynIndex,
    reds: Vec<Option<Red>>,
    red_count: usize,
    cached_by: HashMap<Id, Vec<Id>>,
    heap: BinaryHeap<Entry>,
    shift: f64,
    recomputations: usize,
}

impl BcpState {
    /// Every member of `scene` starts blue. `shift` must exceed every weight
    /// that will be assigned.
    pub fn new(scene: &Scene, cfg: &IndexConfig, shift: f64) -> Self {
        Self {
            body: scene.body.clone(),
            members: scene.members().to_vec(),
            blue: build_index(scene, cfg),
            reds: vec![None; scene.len()],
            red_count: 0,
            cached_by: HashMap::new(),
            heap: BinaryHeap::new(),
            shift,
            recomputations: 0,
        }
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn blue_count(&self) -> usize {
        self.blue.len()
    }

    pub fn red_count(&self) -> usize {
        self.red_count
    }

    pub fn is_blue(&self, id: Id) -> bool {
        self.blue.is_live(id)
    }

    pub fn red(&self, id: Id) -> Option<&Red> {
        self.reds.get(id).and_then(Option::as_ref)
    }

    /// Smallest blue id.
    pub fn any_blue(&self) -> Option<Id> {
        self.blue.any_live()
    }

    /// Nearest-blue recomputations so far.
    pub fn recomputations(&self) -> usize {
        self.recomputations
    }

    /// `dist_K(p, q) + ω(p)` through the shifted homothet `K_p`.
    pub fn shifted_value(&self, p: Id, weight: f64, q: Id) -> f64 {
        let kp = Homothet::new(self.members[p].center, self.shift - weight);
        self.body.homothet_distance(&kp, &self.members[q]) + self.shift
    }

    /// Moves blue `id` to the red side with weight `weight`.
    pub fn make_red(&mut self, id: Id, weight: f64) -> Result<()> {
        self.blue.delete(id)?;
        for p in self.cached_by.remove(&id).unwrap_or_default() {
            if let Some(red) = self.reds[p].as_mut() {
                if red.cache.is_some_and(|(q, _)| q == id) {
                    red.dirty = true;
                }
            }
        }
        self.reds[id] = Some(Red { weight, cache: None, dirty: true, version: 0 });
        self.red_count += 1;
        self.recompute(id);
        Ok(())
    }

    /// Removes red `id` from further consideration.
    pub fn retire(&mut self, id: Id) -> Result<()> {
        match self.reds.get_mut(id) {
            Some(slot @ Some(_)) => {
                *slot = None;
                self.red_count -= 1;
                Ok(())
            }
            Some(None) => Err(Error::AlreadyDeleted(id)),
            None => Err(Error::UnknownId(id)),
        }
    }

    fn recompute(&mut self, p: Id) {
        self.recomputations += 1;
        let query = Homothet::point(self.members[p].center);
        let nearest = self.blue.nn(&query).ok();
        let weight = self.reds[p].as_ref().expect("red").weight;
        let cache = nearest.map(|(q, _)| (q, self.shifted_value(p, weight, q)));
        let red = self.reds[p].as_mut().expect("red");
        red.version = red.version.wrapping_add(1);
        red.dirty = false;
        red.cache = cache;
        if let Some((q, value)) = cache {
            self.cached_by.entry(q).or_default().push(p);
            self.heap.push(Entry { value, red: p, version: red.version });
        }
    }

    /// The minimum pair `(red, blue, value)`; the state is unchanged apart
    /// from cache refreshes.
    pub fn extract_min(&mut self) -> Result<(Id, Id, f64)> {
        while let Some(&top) = self.heap.peek() {
            let Some(red) = self.reds[top.red] else {
                self.heap.pop();
                continue;
            };
            if red.version != top.version {
                self.heap.pop();
                continue;
            }
            if red.dirty {
                self.heap.pop();
                self.recompute(top.red);
                continue;
            }
            let (q, value) = red.cache.expect("clean red has a cache");
            return Ok((top.red, q, value));
        }
        Err(Error::Empty)
    }

    /// Exhaustive minimum over `V × U`, ties by (red, blue) id.
    pub fn brute_min(&self) -> Option<(Id, Id, f64)> {
        let mut best: Option<(Id, Id, f64)> = None;
        for (p, red) in self.reds.iter().enumerate() {
            let Some(red) = red else { continue };
            for q in (0..self.members.len()).filter(|&q| self.blue.is_live(q)) {
                let v = self.body.dist(&self.members[p].center, &self.members[q].center) - self.members[q].size
                    + red.weight;
                if best.is_none_or(|b| v < b.2) {
                    best = Some((p, q, v));
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec, SizeLaw};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn points(n: usize, seed: u64) -> Scene {
        generate(&GeneratorSpec { n, seed, size_law: SizeLaw::Constant { size: 0.0 }, ..GeneratorSpec::default() })
            .unwrap()
    }

    #[test]
    fn single_pair() {
        let s = Scene::new(ConvexBody::euclidean(), vec![Homothet::point([0.0; 3]), Homothet::point([3.0, 4.0, 0.0])]);
        let mut st = BcpState::new(&s, &IndexConfig::default(), 100.0);
        st.make_red(0, 2.0).unwrap();
        let (p, q, v) = st.extract_min().unwrap();
        assert_eq!((p, q), (0, 1));
        assert!((v - 7.0).abs() < 1e-12);
        st.make_red(1, 0.0).unwrap();
        assert!(matches!(st.extract_min(), Err(Error::Empty)));
    }

    #[test]
    fn moving_the_best_blue_exposes_the_runner_up() {
        let s = Scene::new(
            ConvexBody::euclidean(),
            vec![Homothet::point([0.0; 3]), Homothet::point([1.0, 0.0, 0.0]), Homothet::point([0.0, 2.0, 0.0])],
        );
        let mut st = BcpState::new(&s, &IndexConfig::default(), 10.0);
        st.make_red(0, 0.0).unwrap();
        assert_eq!(st.extract_min().unwrap().1, 1);
        st.make_red(1, 5.0).unwrap();
        let (p, q, v) = st.extract_min().unwrap();
        assert_eq!((p, q), (0, 2));
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn interleaved_updates_match_exhaustive_minimum() {
        let s = points(200, 6);
        let mut st = BcpState::new(&s, &IndexConfig::default(), 1e4);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        st.make_red(0, 0.0).unwrap();
        for _ in 0..400 {
            if st.blue_count() == 0 {
                break;
            }
            match st.extract_min() {
                Ok((p, q, v)) => {
                    let (_, _, bv) = st.brute_min().unwrap();
                    assert!((v - bv).abs() < 1e-9, "{v} vs {bv}");
                    if rng.random_bool(0.2) && st.red_count() > 1 {
                        st.retire(p).unwrap();
                    } else {
                        st.make_red(q, v).unwrap();
                    }
                }
                Err(_) => {
                    let b = st.any_blue().unwrap();
                    st.make_red(b, 0.0).unwrap();
                }
            }
        }
    }
}
