mod args;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;
use kprox_core::generate::{congruent_size_for_degree, generate, Distribution, GeneratorSpec, SizeLaw};
use kprox_core::graph::{bfs, dfs, dijkstra, mst_prim, rsp_solve, GraphResult};
use kprox_core::index::{build_index, IndexConfig};
use kprox_core::io::{read_json, read_scene, write_timings, TimingRow};
use kprox_core::oracle::AdjacencyOracle;
use kprox_core::verify::run_suites;
use kprox_core::{ConvexBody, Homothet, IndexKind, Scene};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use args::{Cli, Command, Common, DistributionArg};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            let kind = err.downcast_ref::<kprox_core::Error>().map_or("usage", error_kind);
            let record = json!({ "error": { "kind": kind, "message": format!("{err:#}") } });
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}

fn error_kind(e: &kprox_core::Error) -> &'static str {
    use kprox_core::Error::*;
    match e {
        InvalidBody(_) => "invalid-body",
        UndefinedBisector => "undefined-bisector",
        Empty => "empty",
        UnknownId(_) => "unknown-id",
        AlreadyDeleted(_) => "already-deleted",
        OutOfRange { .. } => "out-of-range",
        InvalidSpec(_) => "invalid-spec",
        NoPath { .. } => "no-path",
        Io(_) => "io",
        Json(_) => "json",
    }
}

fn parse_body(s: &str) -> Result<ConvexBody> {
    let triple = |t: &str| -> Result<[f64; 3]> {
        let v: Vec<f64> = t.split(',').map(str::parse).collect::<Result<_, _>>().context("bad number in --body")?;
        v.try_into().map_err(|_| anyhow::anyhow!("--body needs three comma-separated values"))
    };
    let mut it = s.splitn(3, ':');
    let body = match (it.next(), it.next(), it.next()) {
        (Some("euclidean"), None, None) => ConvexBody::euclidean(),
        (Some("ellipsoid"), Some(axes), None) => ConvexBody::ellipsoid_axes(triple(axes)?)?,
        (Some("lp"), Some(p), scales) => {
            let p = p.parse().context("bad exponent in --body")?;
            ConvexBody::superball(p, scales.map(triple).transpose()?.unwrap_or([1.0; 3]))?
        }
        _ => bail!("unknown body `{s}`; expected euclidean, ellipsoid:A,B,C or lp:P[:A,B,C]"),
    };
    Ok(body)
}

fn spec_of(c: &Common, n: usize, size: f64) -> Result<GeneratorSpec> {
    let distribution = match c.distribution {
        DistributionArg::Uniform => Distribution::Uniform,
        DistributionArg::Clustered => Distribution::Clustered { clusters: 5, sigma: 0.1 * c.extent },
        DistributionArg::Grid => Distribution::Grid,
    };
    let size_law = if c.spread {
        SizeLaw::Uniform { lo: 0.5 * size, hi: 1.5 * size }
    } else {
        SizeLaw::Constant { size }
    };
    Ok(GeneratorSpec { n, seed: c.seed, body: parse_body(&c.body)?, distribution, size_law, extent: c.extent })
}

fn load_scene(c: &Common) -> Result<Scene> {
    match &c.scene {
        Some(path) => read_scene(path).with_context(|| format!("reading scene {}", path.display())),
        None => Ok(generate(&spec_of(c, c.n, c.size)?)?),
    }
}

fn index_config(c: &Common, n: usize, default: IndexKind) -> IndexConfig {
    let mut cfg = IndexConfig { kind: c.structure.unwrap_or(default), seed: c.seed, ..IndexConfig::default() };
    if let Some(t) = c.t {
        cfg.fast.t = t;
    }
    if let Some(s) = c.budget {
        let (kind, g) = IndexKind::from_budget(n, s, cfg.fast.n0);
        cfg.kind = kind;
        match kind {
            IndexKind::Grouped => cfg.group_size = Some(g),
            IndexKind::Linear => cfg.bucket = g.clamp(2, cfg.bucket),
            _ => {}
        }
    }
    cfg
}

fn emit<T: Serialize + ?Sized>(out: Option<&Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn timing(c: &Common, scene: &Scene, cfg: &IndexConfig, op: &str, count: usize, start: Instant) -> Result<()> {
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let Some(path) = &c.timings else { return Ok(()) };
    let peak_mem_bytes = build_index(scene, cfg).stats().memory_bytes();
    let row = TimingRow { n: scene.len(), structure: cfg.kind.to_string(), op: op.into(), count, wall_ms, peak_mem_bytes };
    let file = std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    write_timings(file, &[row])?;
    Ok(())
}

fn random_queries(scene: &Scene, count: usize, seed: u64) -> Vec<Homothet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let d = *scene.domain();
    let mean = scene.members().iter().map(|h| h.size).sum::<f64>() / scene.len().max(1) as f64;
    (0..count)
        .map(|_| {
            let c = std::array::from_fn(|k| rng.random_range(d.lo[k]..=d.hi[k]));
            Homothet::new(c, rng.random_range(0.0..=2.0 * mean))
        })
        .collect()
}

#[derive(Serialize)]
struct QueryAnswer {
    query: Homothet,
    detect: Option<usize>,
    report: Vec<usize>,
    nearest: Option<(usize, f64)>,
}

fn graph_run(c: &Common, op: &str, f: impl FnOnce(&Scene, &IndexConfig) -> kprox_core::Result<GraphResult>) -> Result<ExitCode> {
    let scene = load_scene(c)?;
    let cfg = index_config(c, scene.len(), IndexKind::Fast);
    let start = Instant::now();
    let result = f(&scene, &cfg)?;
    timing(c, &scene, &cfg, op, 1, start)?;
    emit(c.out.as_deref(), &result)?;
    Ok(ExitCode::SUCCESS)
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Generate(c) => {
            let scene = load_scene(&c)?;
            emit(c.out.as_deref(), &scene)?;
        }
        Command::Build(c) => {
            let scene = load_scene(&c)?;
            let cfg = index_config(&c, scene.len(), IndexKind::Fast);
            let start = Instant::now();
            let index = build_index(&scene, &cfg);
            timing(&c, &scene, &cfg, "build", 1, start)?;
            emit(c.out.as_deref(), &index.stats())?;
        }
        Command::Query { common: c, queries, count } => {
            let scene = load_scene(&c)?;
            let cfg = index_config(&c, scene.len(), IndexKind::Fast);
            let queries: Vec<Homothet> = match queries {
                Some(path) => read_json(&path).with_context(|| format!("reading queries {}", path.display()))?,
                None => random_queries(&scene, count, c.seed),
            };
            let index = build_index(&scene, &cfg);
            let start = Instant::now();
            let answers: Vec<QueryAnswer> = queries
                .iter()
                .map(|q| QueryAnswer {
                    query: *q,
                    detect: index.detect(q),
                    report: index.report(q),
                    nearest: index.nn(q).ok(),
                })
                .collect();
            timing(&c, &scene, &cfg, "query", queries.len(), start)?;
            emit(c.out.as_deref(), &answers)?;
        }
        Command::Bfs { common: c, source } => return graph_run(&c, "bfs", |s, cfg| bfs(s, source, cfg)),
        Command::Dfs { common: c, source } => return graph_run(&c, "dfs", |s, cfg| dfs(s, source, cfg)),
        Command::Mst { common: c, r0 } => return graph_run(&c, "mst", |s, cfg| mst_prim(s, r0, cfg)),
        Command::Dijkstra { common: c, r0, source } => {
            return graph_run(&c, "dijkstra", |s, cfg| dijkstra(s, r0, source, cfg))
        }
        Command::Rsp { common: c, source, target, k } => {
            let scene = load_scene(&c)?;
            let cfg = index_config(&c, scene.len(), IndexKind::Grouped);
            let start = Instant::now();
            let result = rsp_solve(&scene, source, target, k, &cfg)?;
            timing(&c, &scene, &cfg, "rsp", result.decisions, start)?;
            emit(c.out.as_deref(), &GraphResult::from(&result))?;
        }
        Command::Verify(c) => {
            let scene = load_scene(&c)?;
            let report = run_suites(&scene, c.seed);
            emit(c.out.as_deref(), &report)?;
            if !report.passed() {
                let failures: Vec<_> = report.failures().collect();
                eprintln!("{}", json!({ "error": { "kind": "verify-failed", "failures": failures } }));
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Bench { common: c, sizes, t_values, degree, queries } => bench(&c, &sizes, &t_values, degree, queries)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn bench(c: &Common, sizes: &[usize], t_values: &[f64], degree: f64, query_count: usize) -> Result<()> {
    let mut rows = Vec::new();
    let body = parse_body(&c.body)?;
    let t_values: Vec<Option<f64>> = if t_values.is_empty() { vec![c.t] } else { t_values.iter().copied().map(Some).collect() };
    for &n in sizes {
        let size = congruent_size_for_degree(&body, n, c.extent, degree);
        let scene = generate(&spec_of(c, n, size)?)?;
        let queries = random_queries(&scene, query_count, c.seed);
        for &t in &t_values {
            let mut cfg = index_config(c, n, IndexKind::Linear);
            if let Some(t) = t {
                cfg.fast.t = t;
            }
            let structure = match t {
                Some(t) if cfg.kind != IndexKind::Linear && cfg.kind != IndexKind::Oracle => format!("{}-t{t}", cfg.kind),
                _ => cfg.kind.to_string(),
            };
            let mut row = |op: &str, count: usize, start: Instant, mem: usize| {
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                rows.push(TimingRow { n, structure: structure.clone(), op: op.into(), count, wall_ms, peak_mem_bytes: mem });
            };
            let start = Instant::now();
            let index = build_index(&scene, &cfg);
            let mem = index.stats().memory_bytes();
            row("build", 1, start, mem);
            let start = Instant::now();
            for q in &queries {
                std::hint::black_box(index.detect(q));
            }
            row("detect", queries.len(), start, mem);
            let start = Instant::now();
            for q in &queries {
                std::hint::black_box(index.report(q));
            }
            row("report", queries.len(), start, mem);
            let start = Instant::now();
            bfs(&scene, 0, &cfg)?;
            row("bfs", 1, start, mem);
        }
        let start = Instant::now();
        let adj = AdjacencyOracle::build(&scene, 0.0);
        std::hint::black_box(adj.bfs(0));
        let mem = adj.edge_count() * 2 * std::mem::size_of::<(usize, f64)>();
        rows.push(TimingRow {
            n,
            structure: "oracle-adjacency".into(),
            op: "bfs".into(),
            count: 1,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            peak_mem_bytes: mem,
        });
    }
    match &c.out {
        Some(path) => write_timings(std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?, &rows)?,
        None => write_timings(std::io::stdout().lock(), &rows)?,
    }
    Ok(())
}
