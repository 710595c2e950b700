use crate::error::{invalid, Result};
use crate::space::{Point, Space};

/// Polyline from `u` to `v` whose `pieces − 1` interior vertices are the
/// evenly spaced points of `[u, v]` pushed off perpendicularly by
/// `amplitude`, alternating sides starting with `first_side` (±1).
///
/// With amplitude 0 this is `[u, v]` subdivided, in any space; otherwise the
/// space needs perpendiculars (Euclidean or hyperbolic).
pub fn zigzag_polyline(space: &Space, u: &Point, v: &Point, pieces: usize, amplitude: f64, first_side: f64) -> Result<Vec<Point>> {
    if pieces == 0 {
        return Err(invalid("zigzag needs at least one piece"));
    }
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(invalid("zigzag amplitude must be finite and nonnegative"));
    }
    let mut out = Vec::with_capacity(pieces + 1);
    out.push(u.clone());
    let mut side = if first_side < 0.0 { -1.0 } else { 1.0 };
    for i in 1..pieces {
        let q = space.geodesic_point(u, v, i as f64 / pieces as f64)?;
        if amplitude > 0.0 {
            out.push(space.perpendicular_offset(&q, v, side, amplitude)?);
        } else {
            out.push(q);
        }
        side = -side;
    }
    out.push(v.clone());
    Ok(out)
}

/// Amplitude making a Euclidean zigzag with piece length `piece` have
/// worst distance-to-arc-length ratio exactly `1/λ`.
pub fn zigzag_amplitude_for(lambda: f64, piece: f64) -> f64 {
    0.5 * piece * (lambda * lambda - 1.0).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_zigzag_vertices() {
        let s = Space::euclidean(2).unwrap();
        let z = zigzag_polyline(&s, &Point::euclidean([0.0, 0.0]), &Point::euclidean([4.0, 0.0]), 4, 0.5, 1.0).unwrap();
        assert_eq!(z.len(), 5);
        assert_eq!(z[1], Point::euclidean([1.0, 0.5]));
        assert_eq!(z[2], Point::euclidean([2.0, -0.5]));
        assert_eq!(z[4], Point::euclidean([4.0, 0.0]));
    }

    #[test]
    fn flat_zigzag_works_in_trees() {
        use crate::space::{EdgeSpec, RTree};
        let s = Space::tree(RTree::new(2, &[EdgeSpec(0, 1, 2.0)], None).unwrap());
        let z = zigzag_polyline(&s, &Point::vertex(0), &Point::vertex(1), 2, 0.0, 1.0).unwrap();
        assert_eq!(z[1], Point::on_edge(0, 1.0));
        assert!(zigzag_polyline(&s, &Point::vertex(0), &Point::vertex(1), 2, 0.1, 1.0).is_err());
    }
}
