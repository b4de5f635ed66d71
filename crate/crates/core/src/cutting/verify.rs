use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Cutting, CuttingConfig};
use crate::geometry::{Point, Scene};
use crate::oracle::level_of_point;
use crate::Id;

/// Measured properties of a cutting against its scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuttingReport {
    pub n: usize,
    pub t: f64,
    pub prism_count: usize,
    pub max_conflict: usize,
    /// Largest conflict list among non-flagged prisms.
    pub max_unflagged_conflict: usize,
    pub conflict_limit: usize,
    pub flagged_leaves: usize,
    /// Level window `[n/(2t), c·n/t]` the ceiling is expected to stay in.
    pub level_window: (f64, f64),
    pub level_window_fraction: f64,
    pub probe_count: usize,
    pub min_probe_level: usize,
    pub median_probe_level: usize,
    pub max_probe_level: usize,
    /// Every stored conflict list equals an exhaustive box-bound scan.
    pub conflict_lists_exact: bool,
    /// Every probe landed in exactly one prism box.
    pub tiling_ok: bool,
    pub wall_time_ms: f64,
}

impl CuttingReport {
    /// CSV header matching [`CuttingReport::csv_row`].
    pub const CSV_HEADER: [&'static str; 7] =
        ["n", "t", "prism_count", "max_conflict", "flagged_leaves", "level_window_fraction", "wall_time_ms"];

    pub fn csv_row(&self) -> [String; 7] {
        [
            self.n.to_string(),
            self.t.to_string(),
            self.prism_count.to_string(),
            self.max_conflict.to_string(),
            self.flagged_leaves.to_string(),
            format!("{:.6}", self.level_window_fraction),
            format!("{:.3}", self.wall_time_ms),
        ]
    }
}

/// Probes ceilings at `config.probe_count` uniform points of the domain and
/// audits conflict lists and tiling.
pub fn verify_cutting<R: Rng + ?Sized>(
    scene: &Scene,
    cutting: &Cutting,
    config: &CuttingConfig,
    rng: &mut R,
) -> CuttingReport {
    let start = Instant::now();
    let n = scene.len();
    let body = &scene.body;
    let store = scene.members();
    let window = (n as f64 / (2.0 * config.t), config.c_conflict * n as f64 / config.t);

    let mut levels = Vec::with_capacity(config.probe_count);
    let mut tiling_ok = true;
    let d = cutting.domain;
    for _ in 0..config.probe_count {
        let x: Point = std::array::from_fn(|k| rng.random_range(d.lo[k]..=d.hi[k]));
        let hits = cutting.prisms.iter().filter(|p| p.bbox.contains_half_open(&x, &d)).count();
        let Some(pi) = cutting.locate(&x) else {
            tiling_ok = false;
            continue;
        };
        tiling_ok &= hits == 1;
        let ceiling = cutting.prisms[pi].ceiling_at(body, store, &x);
        levels.push(level_of_point(scene, &x, ceiling).below);
    }
    let in_window = levels.iter().filter(|&&l| window.0 <= l as f64 && l as f64 <= window.1).count();
    levels.sort_unstable();

    let conflict_lists_exact = cutting.prisms.iter().all(|p| {
        let hi = p.ceiling_bounds.1;
        let scan: Vec<Id> = if p.ceiling.is_none() {
            p.conflict.clone()
        } else {
            (0..n).filter(|&j| body.box_bounds(&store[j], &p.bbox).0 <= hi).collect()
        };
        scan == p.conflict
    });

    CuttingReport {
        n,
        t: config.t,
        prism_count: cutting.prisms.len(),
        max_conflict: cutting.max_conflict(),
        max_unflagged_conflict: cutting
            .prisms
            .iter()
            .filter(|p| !p.flagged)
            .map(|p| p.conflict.len())
            .max()
            .unwrap_or(0),
        conflict_limit: cutting.conflict_limit,
        flagged_leaves: cutting.flagged_count(),
        level_window: window,
        level_window_fraction: if levels.is_empty() { 0.0 } else { in_window as f64 / levels.len() as f64 },
        probe_count: levels.len(),
        min_probe_level: levels.first().copied().unwrap_or(0),
        median_probe_level: levels.get(levels.len() / 2).copied().unwrap_or(0),
        max_probe_level: levels.last().copied().unwrap_or(0),
        conflict_lists_exact,
        tiling_ok,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}
