//! Workloads shared by the criterion benches.

use kprox_core::generate::{congruent_size_for_degree, generate, GeneratorSpec, SizeLaw};
use kprox_core::{ConvexBody, Homothet, Scene};

pub const EXTENT: f64 = 100.0;

/// `n` congruent Euclidean balls with uniform centers and expected
/// intersection-graph degree `degree`.
pub fn congruent_scene(n: usize, degree: f64, seed: u64) -> Scene {
    let body = ConvexBody::euclidean();
    let size = congruent_size_for_degree(&body, n, EXTENT, degree);
    generate(&GeneratorSpec { n, seed, body, size_law: SizeLaw::Constant { size }, extent: EXTENT, ..GeneratorSpec::default() })
        .expect("valid spec")
}

/// `count` queries on a jittered lattice over the domain, sized like the members.
pub fn lattice_queries(scene: &Scene, count: usize) -> Vec<Homothet> {
    let d = *scene.domain();
    let size = scene.members().first().map_or(1.0, |h| h.size);
    let side = (count as f64).cbrt().ceil() as usize;
    (0..count)
        .map(|i| {
            let cell = [i % side, (i / side) % side, i / (side * side)];
            let jitter = (i * 7919 % 1000) as f64 / 1000.0;
            let c = std::array::from_fn(|k| {
                d.lo[k] + (d.hi[k] - d.lo[k]) * (cell[k] as f64 + 0.5 * jitter) / side as f64
            });
            Homothet::new(c, size)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_have_the_requested_shape() {
        let s = congruent_scene(500, 8.0, 1);
        assert_eq!(s.len(), 500);
        let q = lattice_queries(&s, 64);
        assert_eq!(q.len(), 64);
        assert!(q.iter().all(|h| s.domain().contains(&h.center)));
    }
}
