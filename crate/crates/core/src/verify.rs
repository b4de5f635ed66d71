//! Invariant suites with reproducible failure reports.
//!
//! Every check names its module and invariant and carries the seed and the
//! parameters needed to rerun it in isolation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cutting::{build_cutting, verify_cutting, CuttingConfig};
use crate::geometry::{add_scaled, sub, ConvexBody, Homothet, Point, Scene};
use crate::graph::{bfs, dfs, dijkstra, mst_prim, points_of, rsp_decision};
use crate::index::{build_index, FastConfig, FastIndex, IndexConfig, IndexKind, ProximityIndex};
use crate::oracle::{critical_values, AdjacencyOracle, ScratchOracle};
use crate::Id;

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub module: String,
    pub invariant: String,
    pub passed: bool,
    pub detail: String,
    pub seed: u64,
    /// Parameters that reproduce the check, e.g. `n=100 seed=7 structure=fast`.
    pub reproduce: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, module: &str, invariant: &str, seed: u64, reproduce: &str, result: Result<String, String>) {
        let (passed, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(CheckOutcome {
            module: module.into(),
            invariant: invariant.into(),
            passed,
            detail,
            seed,
            reproduce: reproduce.into(),
        });
    }
}

/// Random body: Euclidean, an SPD ellipsoid, or an even-p superball.
pub fn random_body<R: Rng + ?Sized>(rng: &mut R) -> ConvexBody {
    match rng.random_range(0..3) {
        0 => ConvexBody::euclidean(),
        1 => {
            // Q = AᵀA + δI
            let a: [[f64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
            let q = std::array::from_fn(|i| {
                std::array::from_fn(|j| (0..3).map(|k| a[k][i] * a[k][j]).sum::<f64>() + if i == j { 0.2 } else { 0.0 })
            });
            ConvexBody::ellipsoid(q).expect("AᵀA + δI is positive definite")
        }
        _ => {
            let p = [4, 6, 8][rng.random_range(0..3)];
            let scales = std::array::from_fn(|_| rng.random_range(0.5..2.0));
            ConvexBody::superball(p, scales).expect("even p and positive scales")
        }
    }
}

fn random_point<R: Rng + ?Sized>(rng: &mut R, half: f64) -> Point {
    std::array::from_fn(|_| rng.random_range(-half..half))
}

/// Boundary point of `K(c, ρ)` in direction `u`.
fn boundary(body: &ConvexBody, h: &Homothet, u: &Point) -> Point {
    let len = body.norm(u);
    add_scaled(&h.center, h.size / len, u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    /// A ray from `c_i` meets the bisector of `K_i`, `K_j` at most once.
    SingleCrossing,
    /// `K_i ⊆ K_j` iff `dist_K(c_i, c_j) ≤ ρ_j − ρ_i`.
    Containment,
    /// `K_i ⊄ K_j` implies `f_i(c_i) < f_j(c_i)`.
    CenterDomination,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LemmaTally {
    pub trials: usize,
    pub counterexamples: usize,
    /// Trials within tolerance of the decision boundary.
    pub skipped: usize,
    pub first_failure: Option<String>,
}

/// Runs `trials` random instances of `lemma` on random bodies.
pub fn lemma_trials(lemma: Lemma, trials: usize, seed: u64) -> LemmaTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = LemmaTally { trials, ..LemmaTally::default() };
    for trial in 0..trials {
        let body = random_body(&mut rng);
        let ki = Homothet::new(random_point(&mut rng, 3.0), rng.random_range(0.0..2.0));
        let mut kj = Homothet::new(random_point(&mut rng, 3.0), rng.random_range(0.0..2.0));
        if rng.random_bool(0.3) {
            // bias towards nested pairs
            kj.size = ki.size + body.dist(&ki.center, &kj.center) * rng.random_range(0.5..1.5);
        }
        let outcome = match lemma {
            Lemma::SingleCrossing => single_crossing_trial(&body, &ki, &kj, &random_point(&mut rng, 1.0)),
            Lemma::Containment => containment_trial(&body, &ki, &kj, &mut rng),
            Lemma::CenterDomination => center_domination_trial(&body, &ki, &kj, &mut rng),
        };
        match outcome {
            Trial::Holds => {}
            Trial::Skipped => tally.skipped += 1,
            Trial::Fails(why) => {
                tally.counterexamples += 1;
                tally.first_failure.get_or_insert_with(|| {
                    format!("trial {trial} body {} K_i {ki:?} K_j {kj:?}: {why}", body.name())
                });
            }
        }
    }
    tally
}

pub enum Trial {
    Holds,
    Skipped,
    Fails(String),
}

/// `K_i ⊄ K_j` decided geometrically: the boundary point of `K_i` facing away
/// from `c_j` lies outside `K_j`.
fn escapes<R: Rng + ?Sized>(body: &ConvexBody, ki: &Homothet, kj: &Homothet, rng: &mut R) -> Option<f64> {
    let away = sub(&ki.center, &kj.center);
    let mut probes: Vec<Point> = (0..32).map(|_| random_point(rng, 1.0)).collect();
    if body.norm(&away) > 0.0 {
        probes.push(away);
    }
    probes
        .iter()
        .filter(|u| body.norm(u) > 0.0)
        .map(|u| body.dist(&kj.center, &boundary(body, ki, u)) - kj.size)
        .reduce(f64::max)
}

pub fn containment_trial<R: Rng + ?Sized>(body: &ConvexBody, ki: &Homothet, kj: &Homothet, rng: &mut R) -> Trial {
    let gap = body.dist(&ki.center, &kj.center) - (kj.size - ki.size);
    if gap.abs() < TOL {
        return Trial::Skipped;
    }
    let excess = escapes(body, ki, kj, rng).unwrap_or(f64::NEG_INFINITY);
    let criterion = gap < 0.0;
    if criterion != body.contains(kj, ki) {
        return Trial::Fails(format!("predicate disagrees with the criterion, gap {gap:e}"));
    }
    if criterion && excess > TOL {
        return Trial::Fails(format!("criterion says nested but a boundary point is {excess:e} outside"));
    }
    if !criterion && excess <= 0.0 {
        return Trial::Fails(format!("criterion says not nested but no boundary point escapes (gap {gap:e})"));
    }
    Trial::Holds
}

pub fn center_domination_trial<R: Rng + ?Sized>(body: &ConvexBody, ki: &Homothet, kj: &Homothet, rng: &mut R) -> Trial {
    match escapes(body, ki, kj, rng) {
        Some(excess) if excess > TOL => {
            let fi = -ki.size;
            let fj = body.point_distance(kj, &ki.center);
            if fi < fj {
                Trial::Holds
            } else {
                Trial::Fails(format!("f_i(c_i) = {fi} ≥ f_j(c_i) = {fj}"))
            }
        }
        Some(excess) if excess > -TOL => Trial::Skipped,
        _ => Trial::Holds,
    }
}

/// Samples `h(t) = f_j − f_i` densely along the ray and checks one sign
/// change at most, starting positive, located where the kernel reports it.
pub fn single_crossing_trial(body: &ConvexBody, ki: &Homothet, kj: &Homothet, u: &Point) -> Trial {
    if body.norm(u) == 0.0 {
        return Trial::Skipped;
    }
    let gap = body.dist(&ki.center, &kj.center) - (kj.size - ki.size);
    if gap.abs() < TOL {
        return Trial::Skipped;
    }
    let reach = 4.0 * (body.dist(&ki.center, &kj.center) + ki.size + kj.size + 1.0);
    let crossing = match body.ray_bisector_crossing(ki, kj, u, reach) {
        Ok(c) => c,
        Err(_) if gap < 0.0 => return Trial::Holds,
        Err(e) => return Trial::Fails(format!("kernel refused a non-nested pair: {e}")),
    };
    let dir: Point = {
        let len = body.norm(u);
        std::array::from_fn(|k| u[k] / len)
    };
    let h = |t: f64| body.point_distance(kj, &add_scaled(&ki.center, t, &dir)) - (t - ki.size);
    let steps = 400;
    let mut signs = Vec::new();
    let mut change_at = None;
    for s in 0..=steps {
        let t = reach * s as f64 / steps as f64;
        let v = h(t);
        if v.abs() < TOL {
            continue;
        }
        let sign = v > 0.0;
        if signs.last().is_some_and(|&prev| prev != sign) && change_at.is_none() {
            change_at = Some(t);
        }
        if signs.last() != Some(&sign) {
            signs.push(sign);
        }
    }
    if signs.first() == Some(&false) {
        return Trial::Fails("h < 0 at the center".into());
    }
    if signs.len() > 2 {
        return Trial::Fails(format!("{} sign changes along the ray", signs.len() - 1));
    }
    match (change_at, crossing) {
        (Some(t), Some(c)) if c.t <= t + 1e-6 && c.t >= t - reach / steps as f64 - 1e-6 => Trial::Holds,
        (None, None) => Trial::Holds,
        // crossing within tolerance of the far end
        (None, Some(c)) if h(c.t).abs() < 1e-6 => Trial::Holds,
        (a, b) => Trial::Fails(format!("sampled change at {a:?}, kernel crossing {:?}", b.map(|c| c.t))),
    }
}

/// Runs every module's invariant suite on `scene`.
pub fn run_suites(scene: &Scene, seed: u64) -> VerifyReport {
    let mut report = VerifyReport::default();
    let repro = format!("n={} body={} seed={seed}", scene.len(), scene.body.name());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for (lemma, name) in [
        (Lemma::SingleCrossing, "single-crossing"),
        (Lemma::Containment, "containment-criterion"),
        (Lemma::CenterDomination, "center-domination"),
    ] {
        let t = lemma_trials(lemma, 2000, seed);
        let r = match t.first_failure {
            None => Ok(format!("{} trials, {} near-boundary skipped", t.trials, t.skipped)),
            Some(f) => Err(format!("{} counterexamples; first: {f}", t.counterexamples)),
        };
        report.record("geometry-kernel", name, seed, &format!("lemma={name} trials=2000 seed={seed}"), r);
    }
    report.record("geometry-kernel", "triangle-inequality", seed, &repro, triangle_check(&scene.body, &mut rng));

    let m = scene.members();
    report.record("reference-oracle", "critical-values-sorted", seed, &repro, {
        let v = critical_values(scene);
        if v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|&x| x >= 0.0) {
            Ok(format!("{} distinct values", v.len()))
        } else {
            Err("critical values not strictly increasing and non-negative".into())
        }
    });

    if scene.len() >= 8 {
        let cfg = CuttingConfig::default();
        let cutting = build_cutting(scene, &cfg, &mut rng);
        let r = verify_cutting(scene, &cutting, &CuttingConfig { probe_count: 1000, ..cfg.clone() }, &mut rng);
        let check = if !r.conflict_lists_exact {
            Err("stored conflict list differs from an exhaustive scan".into())
        } else if !r.tiling_ok {
            Err("prism boxes do not tile the domain".into())
        } else if r.max_unflagged_conflict > r.conflict_limit {
            Err(format!("conflict {} > limit {}", r.max_unflagged_conflict, r.conflict_limit))
        } else {
            Ok(format!("{} prisms, level window fraction {:.3}", r.prism_count, r.level_window_fraction))
        };
        report.record("shallow-cutting", "conflict-lists-and-tiling", seed, &format!("{repro} t={}", cfg.t), check);
    }

    for kind in [IndexKind::Fast, IndexKind::Grouped, IndexKind::Linear] {
        let r = index_check(scene, kind, seed);
        report.record("proximity-index", "oracle-equivalence", seed, &format!("{repro} structure={kind}"), r);
    }
    report.record("proximity-index", "rebuild-audit", seed, &repro, rebuild_check(scene, seed));

    if !m.is_empty() {
        let cfg = IndexConfig::default();
        let adj = AdjacencyOracle::build(scene, 0.0);
        report.record("graph-engine", "bfs-layers", seed, &format!("{repro} source=0"), {
            let (layers, _) = adj.bfs(0);
            match bfs(scene, 0, &cfg) {
                Ok(r) if r.layers.as_ref() == Some(&layers) => Ok(format!("{} layers", layers.len())),
                Ok(_) => Err("layers differ from textbook BFS".into()),
                Err(e) => Err(e.to_string()),
            }
        });
        report.record("graph-engine", "dfs-white-path", seed, &format!("{repro} source=0"), {
            match dfs(scene, 0, &cfg) {
                Ok(r) => adj
                    .validate_dfs(&r.parents, r.order.as_deref().unwrap_or(&[]))
                    .map(|_| "valid depth-first forest".to_string()),
                Err(e) => Err(e.to_string()),
            }
        });
        let r0 = 0.5 * scene.domain().diameter() / (scene.len() as f64).cbrt();
        let points = points_of(scene);
        let padj = AdjacencyOracle::build(&points, r0);
        report.record("graph-engine", "mst-weight", seed, &format!("{repro} r0={r0}"), {
            let (_, want) = padj.kruskal();
            match mst_prim(scene, r0, &cfg) {
                Ok(r) if (r.total_weight.unwrap_or(f64::NAN) - want).abs() <= TOL => Ok(format!("weight {want}")),
                Ok(r) => Err(format!("weight {:?} vs oracle {want}", r.total_weight)),
                Err(e) => Err(e.to_string()),
            }
        });
        report.record("graph-engine", "dijkstra-distances", seed, &format!("{repro} r0={r0} source=0"), {
            let want = padj.dijkstra(0);
            match dijkstra(scene, r0, 0, &cfg) {
                Ok(r) => match (0..want.len()).find(|&v| !close_or_both_inf(r.distance(v), want[v])) {
                    None => Ok("distances match".into()),
                    Some(v) => Err(format!("vertex {v}: {} vs oracle {}", r.distance(v), want[v])),
                },
                Err(e) => Err(e.to_string()),
            }
        });
        let target = scene.len() - 1;
        report.record("graph-engine", "rsp-decision", seed, &format!("{repro} source=0 target={target} k=3"), {
            let values = critical_values(scene);
            let mut bad = None;
            for &r in values.iter().step_by((values.len() / 20).max(1)) {
                let want = AdjacencyOracle::build(scene, 2.0 * r).hop_distance(0, target, 3).is_some();
                match rsp_decision(scene, 0, target, 3, r, &cfg) {
                    Ok(got) if got == want => {}
                    Ok(got) => {
                        bad = Some(format!("r = {r}: decision {got}, oracle {want}"));
                        break;
                    }
                    Err(e) => {
                        bad = Some(e.to_string());
                        break;
                    }
                }
            }
            bad.map_or(Ok("decisions match".into()), Err)
        });
    }
    report
}

fn close_or_both_inf(a: f64, b: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= TOL
}

fn triangle_check(body: &ConvexBody, rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..2000 {
        let (a, b, c) = (random_point(rng, 10.0), random_point(rng, 10.0), random_point(rng, 10.0));
        let lhs = body.dist(&a, &c);
        let rhs = body.dist(&a, &b) + body.dist(&b, &c);
        if lhs > rhs * (1.0 + 1e-12) + 1e-12 {
            return Err(format!("dist({a:?},{c:?}) = {lhs} > {rhs}"));
        }
        let s = rng.random_range(0.0..5.0);
        let v = sub(&a, &b);
        let scaled = body.norm(&v.map(|x| s * x));
        if (scaled - s * body.norm(&v)).abs() > 1e-9 * (1.0 + scaled) {
            return Err(format!("‖{s}·v‖ = {scaled} ≠ {s}·‖v‖"));
        }
    }
    Ok("2000 triples".into())
}

fn random_query(scene: &Scene, rng: &mut ChaCha8Rng) -> Homothet {
    let d = scene.domain();
    let c = std::array::from_fn(|k| rng.random_range(d.lo[k]..=d.hi[k]));
    Homothet::new(c, rng.random_range(0.0..0.1 * d.diameter()))
}

fn index_check(scene: &Scene, kind: IndexKind, seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut index = build_index(scene, &IndexConfig { seed, ..IndexConfig::of_kind(kind) });
    let mut oracle = ScratchOracle::new(scene);
    for step in 0..300 {
        let q = random_query(scene, &mut rng);
        if step % 3 == 2 && !index.is_empty() {
            let live = oracle.live_ids();
            let id = live[rng.random_range(0..live.len())];
            index.delete(id).map_err(|e| e.to_string())?;
            oracle.delete(id).map_err(|e| e.to_string())?;
            continue;
        }
        if step % 7 == 0 {
            let id = index.insert(q);
            if id != oracle.insert(q) {
                return Err(format!("step {step}: insert handed out id {id}"));
            }
            continue;
        }
        let want = oracle.intersections(&q);
        let got = index.report(&q);
        if got != want {
            return Err(format!("step {step}: report {got:?} vs oracle {want:?}"));
        }
        if index.detect(&q).is_some() != !want.is_empty() {
            return Err(format!("step {step}: detect disagrees"));
        }
        if let (Ok((_, a)), Ok((_, b))) = (index.nn(&q), oracle.nn(&q)) {
            if (a - b).abs() > 1e-8 {
                return Err(format!("step {step}: nn distance {a} vs {b}"));
            }
        }
    }
    Ok("300 mixed operations".into())
}

fn rebuild_check(scene: &Scene, seed: u64) -> Result<String, String> {
    let cfg = FastConfig::default();
    let mut index = FastIndex::build(scene, cfg, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xde1e7e);
    let mut ids: Vec<Id> = (0..scene.len()).collect();
    for k in (1..ids.len()).rev() {
        ids.swap(k, rng.random_range(0..=k));
    }
    for (step, id) in ids.iter().take(scene.len() * 3 / 4).enumerate() {
        index.delete(*id).map_err(|e| e.to_string())?;
        index.audit().map_err(|e| format!("after deletion {step}: {e}"))?;
    }
    let events = &index.rebuild_log().events;
    if let Some(e) = events.iter().find(|e| e.deletions_seen != e.chi_initial) {
        return Err(format!("node rebuilt after {} deletions, counter {}", e.deletions_seen, e.chi_initial));
    }
    Ok(format!("{} rebuilds audited", events.len()))
}
