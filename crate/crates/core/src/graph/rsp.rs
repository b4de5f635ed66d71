use serde::{Deserialize, Serialize};

use super::{bfs_bounded, GraphResult};
use crate::geometry::Scene;
use crate::index::IndexConfig;
use crate::oracle::critical_values;
use crate::{Error, Id, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RspResult {
    pub r_star: f64,
    pub path: Vec<Id>,
    pub hops: usize,
    /// Decision calls made by the search.
    pub decisions: usize,
}

impl From<&RspResult> for GraphResult {
    fn from(r: &RspResult) -> Self {
        GraphResult {
            algorithm: "rsp".into(),
            source: r.path.first().copied(),
            r_star: Some(r.r_star),
            path: Some(r.path.clone()),
            ..GraphResult::default()
        }
    }
}

/// A path of at most `k` edges from `source` to `target` after expanding
/// every member by `r`, if one exists.
pub fn rsp_path(scene: &Scene, source: Id, target: Id, k: usize, r: f64, cfg: &IndexConfig) -> Result<Option<Vec<Id>>> {
    if k == 0 {
        return Err(Error::InvalidSpec("hop bound k must be at least 1".into()));
    }
    scene.get(source)?;
    scene.get(target)?;
    if source == target {
        return Ok(Some(vec![source]));
    }
    let run = bfs_bounded(&scene.expanded(r), source, k, cfg)?;
    if run.parents[target].is_none() {
        return Ok(None);
    }
    let mut path = vec![target];
    while let Some(p) = run.parents[*path.last().expect("non-empty")] {
        path.push(p);
    }
    path.reverse();
    Ok(Some(path))
}

/// Whether a path of at most `k` edges joins `source` and `target` when
/// every member is expanded by `r`.
pub fn rsp_decision(scene: &Scene, source: Id, target: Id, k: usize, r: f64, cfg: &IndexConfig) -> Result<bool> {
    Ok(rsp_path(scene, source, target, k, r, cfg)?.is_some())
}

/// Smallest critical value `r*` at which a path of at most `k` edges exists,
/// by binary search over the sorted distinct tangency radii.
pub fn rsp_solve(scene: &Scene, source: Id, target: Id, k: usize, cfg: &IndexConfig) -> Result<RspResult> {
    let values = critical_values(scene);
    let no_path = || Error::NoPath { from: source, target, k };
    let mut decisions = 0;
    if source == target {
        rsp_path(scene, source, target, k, 0.0, cfg)?;
        return Ok(RspResult { r_star: 0.0, path: vec![source], hops: 0, decisions });
    }
    let (mut lo, mut hi) = (0usize, values.len());
    let last = *values.last().ok_or_else(no_path)?;
    decisions += 1;
    let mut best = rsp_path(scene, source, target, k, last, cfg)?.ok_or_else(no_path)?;
    hi -= 1;
    // invariant: values[hi] accepts, every value below lo rejects
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        decisions += 1;
        match rsp_path(scene, source, target, k, values[mid], cfg)? {
            Some(path) => {
                best = path;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    Ok(RspResult { r_star: values[hi], hops: best.len() - 1, path: best, decisions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexBody, Homothet};

    fn three() -> Scene {
        Scene::new(
            ConvexBody::euclidean(),
            vec![
                Homothet::new([0.0; 3], 1.0),
                Homothet::new([3.0, 0.0, 0.0], 1.0),
                Homothet::new([6.0, 0.0, 0.0], 1.0),
            ],
        )
    }

    #[test]
    fn two_hops_and_one_hop() {
        let cfg = IndexConfig::default();
        let r = rsp_solve(&three(), 0, 2, 2, &cfg).unwrap();
        assert_eq!(r.r_star, 0.5);
        assert_eq!(r.path, vec![0, 1, 2]);
        let r = rsp_solve(&three(), 0, 2, 1, &cfg).unwrap();
        assert_eq!(r.r_star, 2.0);
        assert_eq!(r.path, vec![0, 2]);
    }

    #[test]
    fn decision_examples() {
        let cfg = IndexConfig::default();
        assert!(!rsp_decision(&three(), 0, 2, 5, 0.0, &cfg).unwrap());
        assert!(rsp_decision(&three(), 0, 2, 2, 2.0, &cfg).unwrap());
        assert!(rsp_decision(&three(), 0, 2, 0, 2.0, &cfg).is_err());
    }

    #[test]
    fn single_member_has_no_critical_values() {
        let s = Scene::new(ConvexBody::euclidean(), vec![Homothet::new([0.0; 3], 1.0), Homothet::new([9.0; 3], 1.0)]);
        let s1 = s.subset(&[0]);
        assert_eq!(rsp_solve(&s1, 0, 0, 1, &IndexConfig::default()).unwrap().r_star, 0.0);
        assert!(rsp_solve(&s, 0, 1, 1, &IndexConfig::default()).is_ok());
    }
}
