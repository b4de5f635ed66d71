use crate::geometry::{sub, Point, Scene};
use crate::{Error, Id, Result};

/// Number of members `j ≠ i`, with `K_i ⊄ K_j`, whose bisector with `K_i` is
/// crossed strictly inside the segment from `c_i` to `x`.
pub fn radial_level(scene: &Scene, i: Id, x: &Point) -> Result<usize> {
    let ki = scene.get(i)?;
    let body = &scene.body;
    let dir = sub(x, &ki.center);
    let seg = body.norm(&dir);
    if seg == 0.0 {
        return Ok(0);
    }
    let max_len = (4.0 * scene.domain().diameter()).max(2.0 * seg);
    let mut count = 0;
    for (j, kj) in scene.members().iter().enumerate() {
        if j == i {
            continue;
        }
        match body.ray_bisector_crossing(ki, kj, &dir, max_len) {
            Ok(Some(c)) if c.t < seg => count += 1,
            Ok(_) | Err(Error::UndefinedBisector) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexBody, Homothet};

    #[test]
    fn empty_segment_and_far_neighbors() {
        let s = Scene::new(
            ConvexBody::euclidean(),
            vec![Homothet::new([0.0; 3], 1.0), Homothet::new([50.0, 0.0, 0.0], 1.0)],
        );
        assert_eq!(radial_level(&s, 0, &[0.0; 3]).unwrap(), 0);
        assert_eq!(radial_level(&s, 0, &[0.5, 0.1, 0.0]).unwrap(), 0);
        assert_eq!(radial_level(&s, 0, &[30.0, 0.0, 0.0]).unwrap(), 1);
        assert!(radial_level(&s, 7, &[0.0; 3]).is_err());
    }
}
