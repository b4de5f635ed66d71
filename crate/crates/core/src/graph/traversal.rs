use super::GraphResult;
use crate::geometry::Scene;
use crate::index::{build_index, IndexConfig};
use crate::{Error, Id, Result};

/// Layered BFS of the intersection graph from `source`.
///
/// Frontier members are expanded in increasing id order; each one reports
/// its unvisited neighbors, which join the next layer and are deleted from
/// the index at once.
pub fn bfs(scene: &Scene, source: Id, cfg: &IndexConfig) -> Result<GraphResult> {
    bfs_bounded(scene, source, usize::MAX, cfg)
}

/// BFS stopped after `max_hops` layers beyond the source.
pub fn bfs_bounded(scene: &Scene, source: Id, max_hops: usize, cfg: &IndexConfig) -> Result<GraphResult> {
    scene.get(source)?;
    let n = scene.len();
    let members = scene.members();
    let mut index = build_index(scene, cfg);
    index.delete(source)?;
    let mut parents = vec![None; n];
    let mut order = vec![source];
    let mut layers = vec![vec![source]];
    while layers.len() <= max_hops && !index.is_empty() {
        let mut next = Vec::new();
        for &u in layers.last().expect("source layer") {
            for v in index.report(&members[u]) {
                index.delete(v)?;
                parents[v] = Some(u);
                next.push(v);
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        order.extend_from_slice(&next);
        layers.push(next);
    }
    Ok(GraphResult {
        algorithm: "bfs".into(),
        source: Some(source),
        parents,
        layers: Some(layers),
        order: Some(order),
        ..GraphResult::default()
    })
}

/// Depth-first forest of the intersection graph, rooted first at `source`,
/// then at the smallest unvisited member until all are visited.
pub fn dfs(scene: &Scene, source: Id, cfg: &IndexConfig) -> Result<GraphResult> {
    scene.get(source)?;
    let n = scene.len();
    let members = scene.members();
    let mut index = build_index(scene, cfg);
    let mut parents = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let mut root = Some(source);
    while let Some(r) = root {
        index.delete(r)?;
        order.push(r);
        let mut stack = vec![r];
        while let Some(&u) = stack.last() {
            match index.detect(&members[u]) {
                Some(v) => {
                    index.delete(v)?;
                    parents[v] = Some(u);
                    order.push(v);
                    stack.push(v);
                }
                None => {
                    stack.pop();
                }
            }
        }
        root = index.any_live();
    }
    Ok(GraphResult {
        algorithm: "dfs".into(),
        source: Some(source),
        parents,
        order: Some(order),
        ..GraphResult::default()
    })
}

/// Connected components of the intersection graph, each sorted, ordered by
/// smallest member.
pub fn components(scene: &Scene, cfg: &IndexConfig) -> Result<Vec<Vec<Id>>> {
    let members = scene.members();
    let mut index = build_index(scene, cfg);
    let mut out = Vec::new();
    while let Some(s) = index.any_live() {
        index.delete(s)?;
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            for v in index.report(&members[comp[k]]) {
                index.delete(v)?;
                comp.push(v);
            }
            k += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    if out.iter().map(Vec::len).sum::<usize>() != scene.len() {
        return Err(Error::InvalidSpec("components do not cover the scene".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexBody, Homothet};
    use crate::index::IndexKind;

    fn chain() -> Scene {
        Scene::new(
            ConvexBody::euclidean(),
            vec![
                Homothet::new([0.0; 3], 1.0),
                Homothet::new([2.0, 0.0, 0.0], 1.0),
                Homothet::new([4.0, 0.0, 0.0], 1.0),
            ],
        )
    }

    #[test]
    fn tangent_chain_layers_and_dfs() {
        for kind in [IndexKind::Fast, IndexKind::Linear, IndexKind::Oracle] {
            let cfg = IndexConfig::of_kind(kind);
            let r = bfs(&chain(), 0, &cfg).unwrap();
            assert_eq!(r.layers.unwrap(), vec![vec![0], vec![1], vec![2]]);
            let d = dfs(&chain(), 0, &cfg).unwrap();
            assert_eq!(d.order.unwrap(), vec![0, 1, 2]);
            assert_eq!(d.parents, vec![None, Some(0), Some(1)]);
        }
    }

    #[test]
    fn isolated_source_and_edgeless_forest() {
        let s = Scene::new(
            ConvexBody::euclidean(),
            (0..4).map(|i| Homothet::new([10.0 * i as f64, 0.0, 0.0], 1.0)).collect(),
        );
        let cfg = IndexConfig::default();
        assert_eq!(bfs(&s, 2, &cfg).unwrap().layers.unwrap(), vec![vec![2]]);
        let d = dfs(&s, 2, &cfg).unwrap();
        assert_eq!(d.order.unwrap(), vec![2, 0, 1, 3]);
        assert!(d.parents.iter().all(Option::is_none));
        assert_eq!(components(&s, &cfg).unwrap().len(), 4);
        assert!(matches!(bfs(&s, 9, &cfg), Err(Error::UnknownId(9))));
    }
}
