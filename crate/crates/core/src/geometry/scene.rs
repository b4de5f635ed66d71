use serde::{Deserialize, Serialize};

use super::{Aabb, ConvexBody, Point};
use crate::{Error, Id, Result};

/// `K(c, ρ) = ρK + c`, equivalently the point `(c, ρ)` of R⁴.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Homothet {
    #[serde(rename = "c")]
    pub center: Point,
    #[serde(rename = "rho")]
    pub size: f64,
}

impl Homothet {
    pub fn new(center: Point, size: f64) -> Self {
        debug_assert!(size >= 0.0, "negative homothet size {size}");
        Self { center, size }
    }

    pub fn point(center: Point) -> Self {
        Self { center, size: 0.0 }
    }

    /// Same center, size increased by `r`.
    pub fn expanded(&self, r: f64) -> Self {
        Self { center: self.center, size: self.size + r }
    }
}

/// A body together with an id-indexed family of homothets.
///
/// Ids are positions in `members`. The domain bounds every center, padded by
/// the largest size plus a margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneFile", into = "SceneFile")]
pub struct Scene {
    pub body: ConvexBody,
    members: Vec<Homothet>,
    domain: Aabb,
}

#[derive(Serialize, Deserialize)]
struct SceneFile {
    body: ConvexBody,
    homothets: Vec<Homothet>,
}

impl TryFrom<SceneFile> for Scene {
    type Error = Error;

    fn try_from(f: SceneFile) -> Result<Self> {
        for (i, h) in f.homothets.iter().enumerate() {
            if !(h.size >= 0.0 && h.size.is_finite() && h.center.iter().all(|x| x.is_finite())) {
                return Err(Error::InvalidSpec(format!("homothet {i} is not a finite center with size >= 0")));
            }
        }
        Ok(Scene::new(f.body, f.homothets))
    }
}

impl From<Scene> for SceneFile {
    fn from(s: Scene) -> Self {
        SceneFile { body: s.body, homothets: s.members }
    }
}

pub const DEFAULT_MARGIN: f64 = 1e-3;

impl Scene {
    pub fn new(body: ConvexBody, members: Vec<Homothet>) -> Self {
        Self::with_margin(body, members, DEFAULT_MARGIN)
    }

    pub fn with_margin(body: ConvexBody, members: Vec<Homothet>, margin: f64) -> Self {
        let domain = domain_of(&members, margin);
        Self { body, members, domain }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Homothet] {
        &self.members
    }

    pub fn get(&self, id: Id) -> Result<&Homothet> {
        self.members.get(id).ok_or(Error::UnknownId(id))
    }

    pub fn domain(&self) -> &Aabb {
        &self.domain
    }

    /// Copy of the scene with every size increased by `r`.
    pub fn expanded(&self, r: f64) -> Scene {
        let members = self.members.iter().map(|h| h.expanded(r)).collect();
        Scene::new(self.body.clone(), members)
    }

    /// Sub-scene on the given ids, renumbered densely in the given order.
    pub fn subset(&self, ids: &[Id]) -> Scene {
        Scene::new(self.body.clone(), ids.iter().map(|&i| self.members[i]).collect())
    }
}

/// Bounding box of the centers, padded by the largest size plus `margin`.
/// Degenerate axes get unit padding so the box has volume.
pub fn domain_of(members: &[Homothet], margin: f64) -> Aabb {
    let Some(b) = Aabb::enclosing(members.iter().map(|h| h.center)) else {
        return Aabb::new([-1.0; 3], [1.0; 3]);
    };
    let max_size = members.iter().map(|h| h.size).fold(0.0, f64::max);
    let mut d = b.expanded(max_size + margin);
    for k in 0..3 {
        if d.hi[k] - d.lo[k] <= 0.0 {
            d.lo[k] -= 1.0;
            d.hi[k] += 1.0;
        }
    }
    d
}
