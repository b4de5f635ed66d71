use serde::{Deserialize, Serialize};

use super::{sub, Aabb, Homothet, Point, DIST_EPS};
use crate::{Error, Result};

/// The unit ball of the norm: a compact, centrally symmetric, strictly convex body.
///
/// Construct through [`ConvexBody::euclidean`], [`ConvexBody::ellipsoid`],
/// [`ConvexBody::ellipsoid_axes`] or [`ConvexBody::superball`]; those validate the
/// parameters. Polytopes and odd exponents are rejected because they are not
/// strictly convex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodySpec", into = "BodySpec")]
pub enum ConvexBody {
    Euclidean,
    /// `{x : xᵀQx ≤ 1}` for a symmetric positive-definite `Q`.
    Ellipsoid { q: [[f64; 3]; 3], diagonal: bool },
    /// `{x : Σ |x_k / s_k|^p ≤ 1}` for even `p ≥ 2`.
    Superball { p: u32, scales: [f64; 3] },
}

/// Wire form of a body inside scene files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BodySpec {
    Euclidean,
    Ellipsoid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<[[f64; 3]; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axes: Option<[f64; 3]>,
    },
    Lp {
        p: u32,
        #[serde(default = "unit_scales")]
        scales: [f64; 3],
    },
}

fn unit_scales() -> [f64; 3] {
    [1.0; 3]
}

impl TryFrom<BodySpec> for ConvexBody {
    type Error = Error;

    fn try_from(spec: BodySpec) -> Result<Self> {
        match spec {
            BodySpec::Euclidean => Ok(ConvexBody::Euclidean),
            BodySpec::Ellipsoid { q: Some(q), axes: None } => ConvexBody::ellipsoid(q),
            BodySpec::Ellipsoid { q: None, axes: Some(a) } => ConvexBody::ellipsoid_axes(a),
            BodySpec::Ellipsoid { .. } => {
                Err(Error::InvalidBody("ellipsoid needs exactly one of `q` or `axes`".into()))
            }
            BodySpec::Lp { p, scales } => ConvexBody::superball(p, scales),
        }
    }
}

impl From<ConvexBody> for BodySpec {
    fn from(body: ConvexBody) -> Self {
        match body {
            ConvexBody::Euclidean => BodySpec::Euclidean,
            ConvexBody::Ellipsoid { q, .. } => BodySpec::Ellipsoid { q: Some(q), axes: None },
            ConvexBody::Superball { p, scales } => BodySpec::Lp { p, scales },
        }
    }
}

/// Crossing of a ray from `c_i` with the bisector of two homothets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    /// Ray parameter in K-units: `‖point - c_i‖_K`.
    pub t: f64,
    pub point: Point,
}

const BISECTION_TOL: f64 = 1e-10;
const PROJECTION_TOL: f64 = 1e-9;

impl ConvexBody {
    pub fn euclidean() -> Self {
        ConvexBody::Euclidean
    }

    pub fn ellipsoid(q: [[f64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                if !q[i][j].is_finite() {
                    return Err(Error::InvalidBody("ellipsoid form has non-finite entries".into()));
                }
                if (q[i][j] - q[j][i]).abs() > 1e-12 * (q[i][j].abs() + q[j][i].abs()).max(1.0) {
                    return Err(Error::InvalidBody("ellipsoid form must be symmetric".into()));
                }
            }
        }
        if !is_positive_definite(&q) {
            return Err(Error::InvalidBody("ellipsoid form must be positive definite".into()));
        }
        let diagonal = q[0][1] == 0.0 && q[0][2] == 0.0 && q[1][2] == 0.0;
        Ok(ConvexBody::Ellipsoid { q, diagonal })
    }

    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn ellipsoid_axes(axes: [f64; 3]) -> Result<Self> {
        if axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidBody("semi-axes must be positive".into()));
        }
        let mut q = [[0.0; 3]; 3];
        for k in 0..3 {
            q[k][k] = 1.0 / (axes[k] * axes[k]);
        }
        ConvexBody::ellipsoid(q)
    }

    pub fn superball(p: u32, scales: [f64; 3]) -> Result<Self> {
        if p < 2 || p % 2 != 0 {
            return Err(Error::InvalidBody(format!("lp exponent must be even and >= 2, got {p}")));
        }
        if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidBody("lp scales must be positive".into()));
        }
        Ok(ConvexBody::Superball { p, scales })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConvexBody::Euclidean => "euclidean",
            ConvexBody::Ellipsoid { .. } => "ellipsoid",
            ConvexBody::Superball { .. } => "lp",
        }
    }

    /// ‖v‖_K.
    pub fn norm(&self, v: &Point) -> f64 {
        match self {
            ConvexBody::Euclidean => (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt(),
            ConvexBody::Ellipsoid { q, .. } => quad_form(q, v).max(0.0).sqrt(),
            ConvexBody::Superball { p, scales } => {
                let a = [(v[0] / scales[0]).abs(), (v[1] / scales[1]).abs(), (v[2] / scales[2]).abs()];
                let m = a[0].max(a[1]).max(a[2]);
                if m == 0.0 {
                    return 0.0;
                }
                let p = *p as i32;
                let s: f64 = a.iter().map(|x| (x / m).powi(p)).sum();
                m * s.powf(1.0 / p as f64)
            }
        }
    }

    pub fn dist(&self, a: &Point, b: &Point) -> f64 {
        self.norm(&sub(b, a))
    }

    /// `f_{c,ρ}(x) = dist_K(c, x) - ρ`; negative iff `x` is interior to the homothet.
    pub fn point_distance(&self, h: &Homothet, x: &Point) -> f64 {
        self.dist(&h.center, x) - h.size
    }

    /// `dist_K(c₁, c₂) - ρ₁ - ρ₂`.
    pub fn homothet_distance(&self, a: &Homothet, b: &Homothet) -> f64 {
        self.dist(&a.center, &b.center) - a.size - b.size
    }

    /// Tangency counts as intersecting; see [`DIST_EPS`].
    pub fn intersects(&self, a: &Homothet, b: &Homothet) -> bool {
        self.homothet_distance(a, b) <= DIST_EPS
    }

    /// Whether `inner ⊆ outer`, via `dist_K(c_outer, c_inner) ≤ ρ_outer - ρ_inner`.
    pub fn contains(&self, outer: &Homothet, inner: &Homothet) -> bool {
        self.dist(&outer.center, &inner.center) <= outer.size - inner.size + DIST_EPS
    }

    /// Lower bound on `min_{x ∈ b} ‖x - c‖_K`. Exact for the separable norms.
    pub fn min_dist_to_box(&self, c: &Point, b: &Aabb) -> f64 {
        match self {
            ConvexBody::Ellipsoid { q, diagonal: false } => ellipsoid_box_lower(q, c, b),
            _ => self.norm(&sub(&b.clamp(c), c)),
        }
    }

    /// `max_{x ∈ b} ‖x - c‖_K`, attained at a corner.
    pub fn max_dist_to_box(&self, c: &Point, b: &Aabb) -> f64 {
        match self {
            ConvexBody::Ellipsoid { diagonal: false, .. } => b
                .corners()
                .iter()
                .map(|x| self.dist(c, x))
                .fold(0.0, f64::max),
            // Separable norms grow with each |x_k - c_k|.
            _ => self.norm(&sub(&b.farthest_corner(c), c)),
        }
    }

    /// Interval `[lo, hi]` enclosing `f_i` over the box.
    pub fn box_bounds(&self, h: &Homothet, b: &Aabb) -> (f64, f64) {
        (
            self.min_dist_to_box(&h.center, b) - h.size,
            self.max_dist_to_box(&h.center, b) - h.size,
        )
    }

    /// Unique point on the ray `c_i + t·u`, `t ∈ (0, max_len]`, where `f_i = f_j`.
    ///
    /// `u` is normalized to K-length 1, so `f_i(c_i + t·u) = t - ρ_i` and
    /// `h(t) = f_j - f_i` is non-increasing (‖·‖_K is 1-Lipschitz along the ray).
    /// Fails when `K_i ⊆ K_j`, where the bisector is undefined.
    pub fn ray_bisector_crossing(
        &self,
        ki: &Homothet,
        kj: &Homothet,
        u: &Point,
        max_len: f64,
    ) -> Result<Option<Crossing>> {
        if self.contains(kj, ki) {
            return Err(Error::UndefinedBisector);
        }
        let len = self.norm(u);
        if len == 0.0 {
            return Ok(None);
        }
        let dir = [u[0] / len, u[1] / len, u[2] / len];
        let at = |t: f64| [ki.center[0] + t * dir[0], ki.center[1] + t * dir[1], ki.center[2] + t * dir[2]];
        let h = |t: f64| self.point_distance(kj, &at(t)) - (t - ki.size);

        if h(max_len) > 0.0 {
            return Ok(None);
        }
        let (mut lo, mut hi) = (0.0, max_len);
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        Ok(Some(Crossing { t, point: at(t) }))
    }
}

fn quad_form(q: &[[f64; 3]; 3], v: &Point) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += v[i] * q[i][j] * v[j];
        }
    }
    s
}

fn is_positive_definite(q: &[[f64; 3]; 3]) -> bool {
    // Cholesky.
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = q[i][i] - s;
                if d <= 0.0 {
                    return false;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (q[i][j] - s) / l[j][j];
            }
        }
    }
    true
}

/// Lower bound on `min_{x ∈ b} sqrt((x-c)ᵀQ(x-c))`.
///
/// Coordinate descent on the box-constrained quadratic, stopped when the
/// Frank-Wolfe gap certifies the bound; `g(x) - gap` never exceeds the true
/// minimum because `g` is convex.
fn ellipsoid_box_lower(q: &[[f64; 3]; 3], c: &Point, b: &Aabb) -> f64 {
    let mut x = b.clamp(c);
    let mut lower = 0.0;
    for _ in 0..200 {
        for k in 0..3 {
            let cross: f64 = (0..3).filter(|&l| l != k).map(|l| q[k][l] * (x[l] - c[l])).sum();
            x[k] = (c[k] - cross / q[k][k]).clamp(b.lo[k], b.hi[k]);
        }
        let d = sub(&x, c);
        let g = quad_form(q, &d);
        let mut gap = 0.0;
        for k in 0..3 {
            let grad = 2.0 * (0..3).map(|l| q[k][l] * d[l]).sum::<f64>();
            // min over the box of grad·(y - x)
            gap -= (grad * (b.lo[k] - x[k])).min(grad * (b.hi[k] - x[k]));
        }
        lower = (g - gap).max(0.0);
        if g.sqrt() - lower.sqrt() <= PROJECTION_TOL {
            break;
        }
    }
    lower.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h(c: Point, rho: f64) -> Homothet {
        Homothet::new(c, rho)
    }

    #[test]
    fn norm_examples() {
        assert_eq!(ConvexBody::euclidean().norm(&[3.0, 4.0, 0.0]), 5.0);
        let lp = ConvexBody::superball(4, [1.0; 3]).unwrap();
        assert_relative_eq!(lp.norm(&[1.0, 1.0, 0.0]), 2f64.powf(0.25), max_relative = 1e-15);
        let ell = ConvexBody::ellipsoid_axes([1.0, 2.0, 4.0]).unwrap();
        assert_relative_eq!(ell.norm(&[0.0, 2.0, 0.0]), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn rejects_invalid_bodies() {
        assert!(ConvexBody::superball(3, [1.0; 3]).is_err());
        assert!(ConvexBody::superball(4, [1.0, 0.0, 1.0]).is_err());
        assert!(ConvexBody::ellipsoid([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        assert!(ConvexBody::ellipsoid([[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        assert!(ConvexBody::ellipsoid_axes([1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn distance_examples() {
        let e = ConvexBody::euclidean();
        assert_eq!(e.point_distance(&h([1.0, 2.0, 3.0], 0.7), &[1.0, 2.0, 3.0]), -0.7);
        assert_eq!(e.point_distance(&h([0.0; 3], 1.0), &[3.0, 4.0, 0.0]), 4.0);
        let lp = ConvexBody::superball(4, [1.0; 3]).unwrap();
        assert_relative_eq!(
            lp.point_distance(&h([0.0; 3], 0.5), &[1.0, 1.0, 0.0]),
            2f64.powf(0.25) - 0.5,
            max_relative = 1e-15
        );
        assert_eq!(e.homothet_distance(&h([0.0; 3], 1.0), &h([3.0, 0.0, 0.0], 1.0)), 1.0);
        assert_eq!(e.homothet_distance(&h([1.0; 3], 0.25), &h([1.0; 3], 0.25)), -0.5);
        let ell = ConvexBody::ellipsoid_axes([1.0, 2.0, 4.0]).unwrap();
        assert_relative_eq!(
            ell.homothet_distance(&h([0.0; 3], 1.0), &h([0.0, 4.0, 0.0], 1.0)),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn intersection_and_containment_examples() {
        let e = ConvexBody::euclidean();
        assert!(!e.intersects(&h([0.0; 3], 1.0), &h([3.0, 0.0, 0.0], 1.0)));
        assert!(e.intersects(&h([0.0; 3], 2.0), &h([3.0, 0.0, 0.0], 1.0)));
        assert!(e.contains(&h([0.0; 3], 3.0), &h([1.0, 0.0, 0.0], 1.0)));
        let k = h([0.3, 0.1, -2.0], 1.5);
        assert!(e.contains(&k, &k));
        assert!(!e.contains(&h([0.0; 3], 1.0), &h([1.0, 0.0, 0.0], 1.0)));
    }

    #[test]
    fn bisector_crossing_examples() {
        let e = ConvexBody::euclidean();
        let ki = h([0.0; 3], 1.0);
        let kj = h([4.0, 0.0, 0.0], 1.0);
        let x = e.ray_bisector_crossing(&ki, &kj, &[1.0, 0.0, 0.0], 100.0).unwrap().unwrap();
        assert!((x.point[0] - 2.0).abs() < 1e-9 && x.point[1] == 0.0);
        assert!(e.ray_bisector_crossing(&ki, &kj, &[-1.0, 0.0, 0.0], 100.0).unwrap().is_none());
        let inner = h([0.5, 0.0, 0.0], 0.2);
        assert!(matches!(
            e.ray_bisector_crossing(&inner, &h([0.0; 3], 2.0), &[1.0, 0.0, 0.0], 10.0),
            Err(Error::UndefinedBisector)
        ));
    }

    #[test]
    fn box_lower_bound_is_tight_for_general_ellipsoid() {
        let q = [[2.0, 0.6, 0.1], [0.6, 1.0, -0.3], [0.1, -0.3, 0.5]];
        let body = ConvexBody::ellipsoid(q).unwrap();
        let b = Aabb::new([1.0, -1.0, 0.5], [2.0, 0.5, 3.0]);
        let c = [-1.0, 2.0, -1.0];
        let lo = body.min_dist_to_box(&c, &b);
        // dense grid minimum is an upper bound on the true minimum
        let mut best = f64::INFINITY;
        let m = 60;
        for i in 0..=m {
            for j in 0..=m {
                for k in 0..=m {
                    let x = [
                        1.0 + i as f64 / m as f64,
                        -1.0 + 1.5 * j as f64 / m as f64,
                        0.5 + 2.5 * k as f64 / m as f64,
                    ];
                    best = best.min(body.dist(&c, &x));
                }
            }
        }
        assert!(lo <= best + 1e-12, "{lo} > {best}");
        assert!(best - lo < 0.05, "bound too loose: {lo} vs {best}");
        assert_eq!(body.min_dist_to_box(&b.center(), &b), 0.0);
    }
}
