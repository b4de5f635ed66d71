//! Graph algorithms over implicit intersection and proximity graphs.
//!
//! Nothing here materializes edges. Unvisited members live in a
//! [`ProximityIndex`]; neighbors are found by querying with the homothet of
//! the current vertex and removed from the index as soon as they are visited.
//!
//! The intersection graph `𝒢(𝒦)` joins two members whose homothet distance is
//! at most 0. The proximity graph `𝒢_{r0}` joins members at distance at most
//! `r0`; on a scene it is the intersection graph of the scene expanded by
//! `r0/2`. The weighted algorithms ([`mst_prim`], [`dijkstra`]) treat the
//! scene as the point set of its centers with weights `dist_K`.

mod bcp;
mod rsp;
mod traversal;
mod weighted;

pub use bcp::{BcpState, Red};
pub use rsp::{rsp_decision, rsp_path, rsp_solve, RspResult};
pub use traversal::{bfs, bfs_bounded, components, dfs};
pub use weighted::{dijkstra, mst_prim, points_of};

use serde::{Deserialize, Serialize};

use crate::Id;

/// Output of a graph run; fields an algorithm does not produce are `None`
/// and are left out of the JSON.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphResult {
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Id>,
    /// Tree parent of every member, `None` at roots and unreached members.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parents: Vec<Option<Id>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<Vec<Id>>>,
    /// Discovery order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<Id>>,
    /// Shortest-path distances; `None` (JSON null) for unreachable members.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Option<f64>>>,
    /// Forest edges `(u, v, weight)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(Id, Id, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<Id>>,
}

impl GraphResult {
    /// Layer index of every member, `None` when unreached.
    pub fn layer_of(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.parents.len()];
        for (k, layer) in self.layers.iter().flatten().enumerate() {
            for &v in layer {
                out[v] = Some(k);
            }
        }
        out
    }

    /// Distance of `v`, `+∞` when unreachable or not computed.
    pub fn distance(&self, v: Id) -> f64 {
        self.distances.as_ref().and_then(|d| d.get(v).copied().flatten()).unwrap_or(f64::INFINITY)
    }
}

pub(crate) fn finite(values: &[f64]) -> Vec<Option<f64>> {
    values.iter().map(|&d| d.is_finite().then_some(d)).collect()
}
