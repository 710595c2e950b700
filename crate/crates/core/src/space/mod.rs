//! Concrete geodesic spaces and the uniform interface the rest of the crate
//! is written against: distance, geodesic interpolation, projection onto a
//! segment, and convex-domain membership.
//!
//! | kind         | model                                  | CAT(0) | Gromov hyperbolic |
//! |--------------|----------------------------------------|--------|-------------------|
//! | `euclidean`  | ℝⁿ                                     | yes    | no                |
//! | `hyperbolic` | Poincaré disk                          | yes    | yes (δ ≈ 0.88)    |
//! | `rtree`      | weighted tree, optional ray edge       | yes    | yes (δ = 0)       |
//! | `l2box`      | `{0 ≤ xᵢ ≤ baseⁱ} ⊂ ℓ₂ⁿ`                | yes    | no                |

mod disk;
mod domain;
pub(crate) mod euclid;
mod point;
mod sampler;
pub mod tree;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use domain::DomainSpec;
pub use point::{Point, Segment, TreePoint};
pub use sampler::PointSampler;
pub use tree::{EdgeSpec, RTree};

use crate::error::{invalid, Error, Result};

/// Serializable description of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceSpec {
    Euclidean {
        dim: usize,
    },
    Hyperbolic,
    Rtree {
        vertices: usize,
        edges: Vec<EdgeSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ray: Option<usize>,
    },
    L2box {
        dim: usize,
        #[serde(default = "default_base")]
        base: f64,
    },
}

fn default_base() -> f64 {
    10.0
}

/// Upper bound accepted for vector dimensions read from configuration.
pub const MAX_DIM: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Euclidean,
    Hyperbolic,
    RTree,
    L2Box,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Euclidean => "euclidean",
            SpaceKind::Hyperbolic => "hyperbolic",
            SpaceKind::RTree => "rtree",
            SpaceKind::L2Box => "l2box",
        }
    }

    /// Whether the kind is Gromov hyperbolic.
    pub fn is_gromov_hyperbolic(self) -> bool {
        matches!(self, SpaceKind::Hyperbolic | SpaceKind::RTree)
    }
}

/// A geodesic space instance. Cheap to clone.
#[derive(Debug, Clone)]
pub enum Space {
    Euclidean { dim: usize },
    Hyperbolic,
    Tree(Arc<RTree>),
    L2Box { dim: usize, base: f64 },
}

impl Space {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid(format!("euclidean dimension must be in 1..={MAX_DIM}")));
        }
        Ok(Space::Euclidean { dim })
    }

    pub fn hyperbolic() -> Self {
        Space::Hyperbolic
    }

    pub fn tree(tree: RTree) -> Self {
        Space::Tree(Arc::new(tree))
    }

    pub fn l2box(dim: usize, base: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid(format!("l2box dimension must be in 1..={MAX_DIM}")));
        }
        if !(base.is_finite() && base > 1.0) {
            return Err(invalid("l2box base must be a finite number > 1"));
        }
        if !base.powi(dim as i32).is_finite() {
            return Err(invalid("l2box bounds overflow"));
        }
        Ok(Space::L2Box { dim, base })
    }

    pub fn from_spec(spec: &SpaceSpec) -> Result<Self> {
        match spec {
            SpaceSpec::Euclidean { dim } => Space::euclidean(*dim),
            SpaceSpec::Hyperbolic => Ok(Space::Hyperbolic),
            SpaceSpec::Rtree { vertices, edges, ray } => Ok(Space::tree(RTree::new(*vertices, edges, *ray)?)),
            SpaceSpec::L2box { dim, base } => Space::l2box(*dim, *base),
        }
    }

    pub fn spec(&self) -> SpaceSpec {
        match self {
            Space::Euclidean { dim } => SpaceSpec::Euclidean { dim: *dim },
            Space::Hyperbolic => SpaceSpec::Hyperbolic,
            Space::Tree(t) => SpaceSpec::Rtree {
                vertices: t.vertex_count(),
                edges: t.edge_specs(),
                ray: t.ray_anchor(),
            },
            Space::L2Box { dim, base } => SpaceSpec::L2box { dim: *dim, base: *base },
        }
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            Space::Euclidean { .. } => SpaceKind::Euclidean,
            Space::Hyperbolic => SpaceKind::Hyperbolic,
            Space::Tree(_) => SpaceKind::RTree,
            Space::L2Box { .. } => SpaceKind::L2Box,
        }
    }

    pub fn as_tree(&self) -> Option<&RTree> {
        match self {
            Space::Tree(t) => Some(t),
            _ => None,
        }
    }

    /// Upper bound of coordinate `i` (0-based) of the ℓ₂ box: `base^(i+1)`.
    pub fn l2box_bound(&self, i: usize) -> Option<f64> {
        match self {
            Space::L2Box { base, .. } => Some(base.powi(i as i32 + 1)),
            _ => None,
        }
    }

    /// Relative tolerance appropriate for approximate post-conditions.
    pub fn tolerance(&self) -> f64 {
        match self {
            Space::Hyperbolic => 1e-7,
            _ => 1e-9,
        }
    }

    fn mismatch(&self, p: &Point) -> Error {
        invalid(format!("{} point used with a {} space", p.kind_name(), self.kind().name()))
    }

    /// Checks the point belongs to this space.
    pub fn validate(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (Space::Euclidean { dim }, Point::Euclidean(v)) => {
                if v.len() != *dim {
                    return Err(invalid(format!("expected {dim} coordinates, got {}", v.len())));
                }
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(invalid("non-finite coordinate"));
                }
                Ok(())
            }
            (Space::Hyperbolic, Point::Hyperbolic(v)) => {
                if !v.iter().all(|c| c.is_finite()) || v[0] * v[0] + v[1] * v[1] >= 1.0 {
                    return Err(invalid("hyperbolic point must lie in the open unit disk"));
                }
                Ok(())
            }
            (Space::Tree(t), Point::Tree(tp)) => t.validate(tp),
            (Space::L2Box { dim, base }, Point::L2Box(v)) => {
                if v.len() != *dim {
                    return Err(invalid(format!("expected {dim} coordinates, got {}", v.len())));
                }
                let mut bound = 1.0;
                for (i, &c) in v.iter().enumerate() {
                    bound *= base;
                    if !(c.is_finite() && (0.0..=bound).contains(&c)) {
                        return Err(invalid(format!("coordinate {} = {c} outside [0, {bound}]", i + 1)));
                    }
                }
                Ok(())
            }
            _ => Err(self.mismatch(p)),
        }
    }

    fn check2(&self, x: &Point, y: &Point) -> Result<()> {
        self.validate(x)?;
        self.validate(y)
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check2(x, y)?;
        Ok(self.distance_unchecked(x, y))
    }

    /// Distance without validation; the caller guarantees both points belong
    /// to this space.
    pub(crate) fn distance_unchecked(&self, x: &Point, y: &Point) -> f64 {
        match (self, x, y) {
            (Space::Euclidean { .. } | Space::L2Box { .. }, Point::Euclidean(a), Point::Euclidean(b))
            | (Space::Euclidean { .. } | Space::L2Box { .. }, Point::L2Box(a), Point::L2Box(b)) => euclid::dist(a, b),
            (Space::Hyperbolic, Point::Hyperbolic(a), Point::Hyperbolic(b)) => disk::distance(a, b),
            (Space::Tree(t), Point::Tree(a), Point::Tree(b)) => t.distance(a, b),
            _ => f64::NAN,
        }
    }

    /// The point `z` of `[x, y]` with `d(x, z) = t d(x, y)`.
    pub fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        self.check2(x, y)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid(format!("interpolation parameter {t} outside [0, 1]")));
        }
        if t == 0.0 {
            return Ok(x.clone());
        }
        if t == 1.0 {
            return Ok(y.clone());
        }
        Ok(match (self, x, y) {
            (Space::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => Point::Euclidean(euclid::lerp(a, b, t)),
            (Space::L2Box { .. }, Point::L2Box(a), Point::L2Box(b)) => Point::L2Box(euclid::lerp(a, b, t)),
            (Space::Hyperbolic, Point::Hyperbolic(a), Point::Hyperbolic(b)) => {
                Point::Hyperbolic(disk::toward(a, b, t * disk::distance(a, b)))
            }
            (Space::Tree(tr), Point::Tree(a), Point::Tree(b)) => Point::Tree(tr.interpolate(a, b, t)),
            _ => unreachable!("validated"),
        })
    }

    /// The point of `[x, y]` at distance `min(s, d(x, y))` from `x`.
    pub fn point_toward(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        self.check2(x, y)?;
        if !(s >= 0.0) {
            return Err(invalid(format!("distance {s} must be nonnegative")));
        }
        if s == 0.0 {
            return Ok(x.clone());
        }
        Ok(match (self, x, y) {
            (Space::Euclidean { .. } | Space::L2Box { .. }, _, _) => {
                let d = self.distance_unchecked(x, y);
                if s >= d {
                    return Ok(y.clone());
                }
                let t = s / d;
                match (x, y) {
                    (Point::Euclidean(a), Point::Euclidean(b)) => Point::Euclidean(euclid::lerp(a, b, t)),
                    (Point::L2Box(a), Point::L2Box(b)) => Point::L2Box(euclid::lerp(a, b, t)),
                    _ => unreachable!("validated"),
                }
            }
            (Space::Hyperbolic, Point::Hyperbolic(a), Point::Hyperbolic(b)) => Point::Hyperbolic(disk::toward(a, b, s)),
            (Space::Tree(tr), Point::Tree(a), Point::Tree(b)) => Point::Tree(tr.walk(a, b, s)),
            _ => unreachable!("validated"),
        })
    }

    /// Nearest point of `seg` to `p` and the distance to it. A degenerate
    /// segment projects everything onto its single point.
    pub fn project_to_segment(&self, p: &Point, seg: &Segment) -> Result<(Point, f64)> {
        self.validate(p)?;
        self.check2(&seg.a, &seg.b)?;
        let q = match (self, p, &seg.a, &seg.b) {
            (Space::Euclidean { .. }, Point::Euclidean(pp), Point::Euclidean(a), Point::Euclidean(b)) => {
                Point::Euclidean(euclid::lerp(a, b, euclid::project_param(pp, a, b)))
            }
            (Space::L2Box { .. }, Point::L2Box(pp), Point::L2Box(a), Point::L2Box(b)) => {
                Point::L2Box(euclid::lerp(a, b, euclid::project_param(pp, a, b)))
            }
            (Space::Hyperbolic, Point::Hyperbolic(pp), Point::Hyperbolic(a), Point::Hyperbolic(b)) => {
                Point::Hyperbolic(disk::project(pp, a, b))
            }
            (Space::Tree(t), Point::Tree(pp), Point::Tree(a), Point::Tree(b)) => {
                let (q, d) = t.project(pp, a, b);
                return Ok((Point::Tree(q), tree::to_f64(&d)));
            }
            _ => unreachable!("validated"),
        };
        let d = self.distance_unchecked(p, &q);
        Ok((q, d))
    }

    /// Alexandrov angle at `apex` between `[apex, y]` and `[apex, z]`.
    pub(crate) fn angle_at(&self, apex: &Point, y: &Point, z: &Point) -> f64 {
        match (self, apex, y, z) {
            (Space::Euclidean { .. } | Space::L2Box { .. }, a, b, c) => {
                euclid::angle(a.coords().unwrap_or(&[]), b.coords().unwrap_or(&[]), c.coords().unwrap_or(&[]))
            }
            (Space::Hyperbolic, Point::Hyperbolic(a), Point::Hyperbolic(b), Point::Hyperbolic(c)) => disk::angle(a, b, c),
            (Space::Tree(t), Point::Tree(a), Point::Tree(b), Point::Tree(c)) => {
                if t.share_direction(a, b, c) {
                    0.0
                } else {
                    std::f64::consts::PI
                }
            }
            _ => f64::NAN,
        }
    }

    /// Point at distance `s` beyond `y` on the geodesic from `x` through `y`,
    /// when that continuation exists and is unique in this space.
    pub fn extend_geodesic(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        self.check2(x, y)?;
        let none = || Error::PreconditionViolated("geodesic has no unique continuation here".into());
        let p = match (self, x, y) {
            (Space::Euclidean { .. } | Space::L2Box { .. }, _, _) => {
                let (a, b) = (x.coords().unwrap_or(&[]), y.coords().unwrap_or(&[]));
                let d = euclid::dist(a, b);
                if d == 0.0 {
                    return Err(none());
                }
                let v: Vec<f64> = a.iter().zip(b).map(|(p, q)| q + (q - p) * s / d).collect();
                match self {
                    Space::Euclidean { .. } => Point::Euclidean(v),
                    _ => Point::L2Box(v),
                }
            }
            (Space::Hyperbolic, Point::Hyperbolic(a), Point::Hyperbolic(b)) => Point::Hyperbolic(disk::extend(a, b, s).ok_or_else(none)?),
            (Space::Tree(t), Point::Tree(a), Point::Tree(b)) => Point::Tree(t.extend(a, b, s).ok_or_else(none)?),
            _ => unreachable!("validated"),
        };
        self.validate(&p).map_err(|_| none())?;
        Ok(p)
    }

    /// Point at distance `h` from `q` on the geodesic through `q` that is
    /// perpendicular to `[q, toward]`; `side` picks the orientation.
    /// Only the Euclidean and hyperbolic spaces (dimension ≥ 2) have one.
    pub fn perpendicular_offset(&self, q: &Point, toward: &Point, side: f64, h: f64) -> Result<Point> {
        self.check2(q, toward)?;
        let p = match (self, q, toward) {
            (Space::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
                let dir: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
                let n = euclid::orthogonal_unit(&dir).ok_or_else(|| Error::Degenerate("no perpendicular direction".into()))?;
                Point::Euclidean(a.iter().zip(&n).map(|(x, u)| x + side.signum() * h * u).collect())
            }
            (Space::Hyperbolic, Point::Hyperbolic(a), Point::Hyperbolic(b)) => {
                Point::Hyperbolic(disk::perpendicular(a, b, side, h).ok_or_else(|| Error::Degenerate("coincident points".into()))?)
            }
            _ => return Err(Error::UnsupportedSpace(self.kind().name())),
        };
        self.validate(&p)?;
        Ok(p)
    }

    /// Point at distance `s` from `p` leaving at angle `theta` to the
    /// direction of `reference` (2-dimensional spaces only).
    pub fn shoot(&self, p: &Point, reference: &Point, theta: f64, s: f64) -> Result<Point> {
        self.check2(p, reference)?;
        let out = match (self, p, reference) {
            (Space::Euclidean { dim: 2 }, Point::Euclidean(a), Point::Euclidean(b)) => {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let base = if dx == 0.0 && dy == 0.0 { 0.0 } else { dy.atan2(dx) };
                let ang = base + theta;
                Point::Euclidean(vec![a[0] + s * ang.cos(), a[1] + s * ang.sin()])
            }
            (Space::Hyperbolic, Point::Hyperbolic(a), Point::Hyperbolic(b)) => Point::Hyperbolic(disk::shoot(a, b, theta, s)),
            _ => return Err(Error::UnsupportedSpace(self.kind().name())),
        };
        self.validate(&out)?;
        Ok(out)
    }

    /// Whether `p` lies in `domain`.
    pub fn domain_contains(&self, domain: &DomainSpec, p: &Point) -> Result<bool> {
        domain::contains(self, domain, p)
    }

    /// Checks that `domain` is meaningful for this space.
    pub fn validate_domain(&self, domain: &DomainSpec) -> Result<()> {
        domain::validate(self, domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tripod() -> Space {
        Space::tree(RTree::new(4, &[EdgeSpec(0, 1, 1.0), EdgeSpec(0, 2, 1.0), EdgeSpec(0, 3, 1.0)], None).unwrap())
    }

    #[test]
    fn euclidean_pythagoras() {
        let s = Space::euclidean(2).unwrap();
        assert_eq!(s.distance(&Point::euclidean([0.0, 0.0]), &Point::euclidean([3.0, 4.0])).unwrap(), 5.0);
    }

    #[test]
    fn tripod_leaves_are_two_apart() {
        let s = tripod();
        assert_eq!(s.distance(&Point::vertex(1), &Point::vertex(2)).unwrap(), 2.0);
    }

    #[test]
    fn hyperbolic_distance_matches_arccosh_form() {
        let s = Space::hyperbolic();
        let d = s.distance(&Point::hyperbolic(0.0, 0.0), &Point::hyperbolic(0.5, 0.0)).unwrap();
        // arccosh(1 + 2·0.25 / (1 · 0.75)) = arccosh(5/3) = ln 3
        let oracle = (1.0f64 + 2.0 * 0.25 / 0.75).acosh();
        assert!((d - oracle).abs() < 1e-14);
        assert!((d - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn mismatched_kinds_are_rejected() {
        let s = Space::euclidean(2).unwrap();
        assert!(matches!(
            s.distance(&Point::euclidean([0.0, 0.0]), &Point::hyperbolic(0.0, 0.0)),
            Err(Error::InvalidInput(_))
        ));
        assert!(s.distance(&Point::euclidean([0.0]), &Point::euclidean([0.0, 0.0])).is_err());
        assert!(Space::hyperbolic().validate(&Point::hyperbolic(1.0, 0.0)).is_err());
    }

    #[test]
    fn geodesic_point_endpoints_and_midpoints() {
        let e = Space::euclidean(2).unwrap();
        let (x, y) = (Point::euclidean([0.0, 0.0]), Point::euclidean([2.0, 0.0]));
        assert_eq!(e.geodesic_point(&x, &y, 0.0).unwrap(), x);
        assert_eq!(e.geodesic_point(&x, &y, 0.5).unwrap(), Point::euclidean([1.0, 0.0]));
        assert!(e.geodesic_point(&x, &y, 1.5).is_err());
        assert!(e.geodesic_point(&x, &y, -0.1).is_err());
        let t = tripod();
        assert_eq!(t.geodesic_point(&Point::vertex(1), &Point::vertex(2), 0.5).unwrap(), Point::vertex(0));
        let h = Space::hyperbolic();
        let a = Point::hyperbolic(0.3, -0.2);
        assert_eq!(h.geodesic_point(&a, &Point::hyperbolic(0.1, 0.6), 0.0).unwrap(), a);
    }

    #[test]
    fn projection_examples() {
        let e = Space::euclidean(2).unwrap();
        let seg = Segment::new(Point::euclidean([0.0, 0.0]), Point::euclidean([2.0, 0.0]));
        let (q, d) = e.project_to_segment(&Point::euclidean([1.0, 1.0]), &seg).unwrap();
        assert_eq!((q, d), (Point::euclidean([1.0, 0.0]), 1.0));
        let (q, d) = e.project_to_segment(&Point::euclidean([3.0, 1.0]), &seg).unwrap();
        assert_eq!(q, Point::euclidean([2.0, 0.0]));
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        let t = tripod();
        let (q, d) = t
            .project_to_segment(&Point::vertex(3), &Segment::new(Point::vertex(1), Point::vertex(2)))
            .unwrap();
        assert_eq!((q, d), (Point::vertex(0), 1.0));
    }

    #[test]
    fn degenerate_segment_projects_to_its_point() {
        let h = Space::hyperbolic();
        let x = Point::hyperbolic(0.2, 0.1);
        let p = Point::hyperbolic(-0.4, 0.3);
        let (q, d) = h.project_to_segment(&p, &Segment::new(x.clone(), x.clone())).unwrap();
        assert_eq!(q, x);
        assert_eq!(d, h.distance(&p, &x).unwrap());
    }

    #[test]
    fn angles_per_space() {
        let e = Space::euclidean(2).unwrap();
        let a = e.angle_at(&Point::euclidean([0.0, 0.0]), &Point::euclidean([1.0, 0.0]), &Point::euclidean([0.0, 1.0]));
        assert!((a - PI / 2.0).abs() < 1e-15);
        let t = tripod();
        assert_eq!(t.angle_at(&Point::vertex(0), &Point::vertex(1), &Point::vertex(2)), PI);
        assert_eq!(t.angle_at(&Point::vertex(0), &Point::vertex(1), &Point::on_edge(0, 0.5)), 0.0);
    }

    #[test]
    fn l2box_bounds() {
        let s = Space::l2box(3, 10.0).unwrap();
        assert!(s.validate(&Point::l2box([5.0, 50.0, 500.0])).is_ok());
        assert!(s.validate(&Point::l2box([11.0, 0.0, 0.0])).is_err());
        assert!(Space::l2box(3, 1.0).is_err());
        assert!(Space::l2box(0, 10.0).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let t = tripod();
        let back = Space::from_spec(&t.spec()).unwrap();
        assert_eq!(back.spec(), t.spec());
    }
}
