use std::time::Instant;
use kprox_core::generate::*;
use kprox_core::graph::*;
use kprox_core::index::*;
use kprox_core::oracle::*;
use kprox_core::ConvexBody;
fn main() {
    for n in [150, 300, 500] {
        let s = generate(&GeneratorSpec { n, seed: 1, size_law: SizeLaw::Uniform{lo:0.1,hi:1.5}, extent: 15.0, body: ConvexBody::euclidean(), ..GeneratorSpec::default() }).unwrap();
        let cfg = IndexConfig::default();
        let r0 = s.domain().diameter() / (n as f64).cbrt();
        let t = Instant::now(); bfs(&s, 0, &cfg).unwrap(); let a = t.elapsed();
        let t = Instant::now(); dfs(&s, 0, &cfg).unwrap(); let b = t.elapsed();
        let t = Instant::now(); mst_prim(&s, r0, &cfg).unwrap(); let c = t.elapsed();
        let t = Instant::now(); dijkstra(&s, r0, 0, &cfg).unwrap(); let d = t.elapsed();
        let t = Instant::now(); let v = critical_values(&s); let r = rsp_solve(&s, 0, 5, 3, &cfg).unwrap(); let e = t.elapsed();
        let t = Instant::now(); rsp_decision(&s, 0, 5, 3, v[v.len()-1], &cfg).unwrap(); let f = t.elapsed();
        println!("n {n}: bfs {a:?} dfs {b:?} mst {c:?} dij {d:?} rsp {e:?} ({} decisions) top-decision {f:?}", r.decisions);
    }
}
