use super::{finite, BcpState, GraphResult};
use crate::geometry::{Homothet, Scene, DIST_EPS};
use crate::index::IndexConfig;
use crate::{Error, Id, Result};

/// The centers of `scene` as a point set.
pub fn points_of(scene: &Scene) -> Scene {
    Scene::new(scene.body.clone(), scene.members().iter().map(|h| Homothet::point(h.center)).collect())
}

/// Minimum spanning forest of the proximity graph on the centers, edges of
/// weight `dist_K ≤ r0`, by Prim with a maintained closest pair between the
/// visited and unvisited members.
pub fn mst_prim(scene: &Scene, r0: f64, cfg: &IndexConfig) -> Result<GraphResult> {
    if !(r0 >= 0.0) {
        return Err(Error::InvalidSpec(format!("r0 must be non-negative, got {r0}")));
    }
    let points = points_of(scene);
    let n = points.len();
    let mut parents = vec![None; n];
    let mut edges = Vec::new();
    let mut total = 0.0;
    let mut bcp = BcpState::new(&points, cfg, 1.0);
    let mut component: Vec<Id> = Vec::new();
    while let Some(root) = bcp.any_blue() {
        for v in component.drain(..) {
            bcp.retire(v)?;
        }
        bcp.make_red(root, 0.0)?;
        component.push(root);
        while let Ok((p, q, _)) = bcp.extract_min() {
            let w = points.body.dist(&points.members()[p].center, &points.members()[q].center);
            if w > r0 + DIST_EPS {
                break;
            }
            bcp.make_red(q, 0.0)?;
            component.push(q);
            parents[q] = Some(p);
            edges.push((p, q, w));
            total += w;
        }
    }
    Ok(GraphResult {
        algorithm: "mst".into(),
        parents,
        edges: Some(edges),
        total_weight: Some(total),
        ..GraphResult::default()
    })
}

/// Shortest paths from `source` in the proximity graph on the centers, edges
/// of weight `dist_K ≤ r0`.
///
/// Settled members are red with `ω` = their distance. The minimum pair
/// `(p*, q*)` either settles `q*` at `ω(p*) + dist_K(p*, q*)`, or, when the
/// pair is longer than `r0`, shows that no unsettled member is adjacent to
/// `p*`, which is then retired.
pub fn dijkstra(scene: &Scene, r0: f64, source: Id, cfg: &IndexConfig) -> Result<GraphResult> {
    if !(r0 >= 0.0) {
        return Err(Error::InvalidSpec(format!("r0 must be non-negative, got {r0}")));
    }
    scene.get(source)?;
    let points = points_of(scene);
    let n = points.len();
    // above any shortest-path length: at most n - 1 hops of length r0
    let shift = n as f64 * r0 + n as f64 * DIST_EPS + 1.0;
    let mut bcp = BcpState::new(&points, cfg, shift);
    let mut dist = vec![f64::INFINITY; n];
    let mut parents = vec![None; n];
    let mut order = vec![source];
    dist[source] = 0.0;
    bcp.make_red(source, 0.0)?;
    while let Ok((p, q, _)) = bcp.extract_min() {
        let d = points.body.dist(&points.members()[p].center, &points.members()[q].center);
        if d <= r0 + DIST_EPS {
            dist[q] = dist[p] + d;
            parents[q] = Some(p);
            order.push(q);
            bcp.make_red(q, dist[q])?;
        } else {
            bcp.retire(p)?;
        }
    }
    Ok(GraphResult {
        algorithm: "dijkstra".into(),
        source: Some(source),
        parents,
        order: Some(order),
        distances: Some(finite(&dist)),
        ..GraphResult::default()
    })
}
