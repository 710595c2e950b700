use serde::{Deserialize, Serialize};

use super::{Point, Space, TreePoint};
use crate::error::{invalid, Result};

/// A closed convex subset of a space where games are played.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    /// The whole space (for `l2box`, the box itself).
    Whole,
    /// Closed metric ball; balls are convex in every provided space.
    Ball { center: Point, radius: f64 },
    /// The ℓ₂ box itself.
    Box,
    /// Union of the listed edges of a tree; must be connected.
    Subtree { edges: Vec<usize> },
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec::Whole
    }
}

pub(super) fn validate(space: &Space, domain: &DomainSpec) -> Result<()> {
    match domain {
        DomainSpec::Whole => Ok(()),
        DomainSpec::Ball { center, radius } => {
            space.validate(center)?;
            if !(radius.is_finite() && *radius >= 0.0) {
                return Err(invalid("ball radius must be finite and nonnegative"));
            }
            Ok(())
        }
        DomainSpec::Box => match space {
            Space::L2Box { .. } => Ok(()),
            _ => Err(invalid("box domain requires an l2box space")),
        },
        DomainSpec::Subtree { edges } => {
            let tree = space.as_tree().ok_or_else(|| invalid("subtree domain requires an rtree space"))?;
            if edges.is_empty() {
                return Err(invalid("subtree domain needs at least one edge"));
            }
            if let Some(&e) = edges.iter().find(|&&e| e >= tree.edge_count()) {
                return Err(invalid(format!("subtree references missing edge {e}")));
            }
            // Connectivity via union-find over the vertices the edges touch.
            let n = tree.vertex_count();
            let mut parent: Vec<usize> = (0..n).collect();
            fn root(parent: &mut [usize], mut v: usize) -> usize {
                while parent[v] != v {
                    parent[v] = parent[parent[v]];
                    v = parent[v];
                }
                v
            }
            let mut touched = Vec::with_capacity(edges.len() * 2);
            for &e in edges {
                let (a, b) = tree.edge_endpoints(e).expect("checked");
                touched.push(a);
                if let Some(b) = b {
                    touched.push(b);
                    let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                    parent[ra] = rb;
                }
            }
            let r0 = root(&mut parent, touched[0]);
            if touched.iter().all(|&v| root(&mut parent, v) == r0) {
                Ok(())
            } else {
                Err(invalid("subtree edges are not connected"))
            }
        }
    }
}

pub(super) fn contains(space: &Space, domain: &DomainSpec, p: &Point) -> Result<bool> {
    space.validate(p)?;
    validate(space, domain)?;
    Ok(match domain {
        DomainSpec::Whole | DomainSpec::Box => true,
        DomainSpec::Ball { center, radius } => space.distance_unchecked(center, p) <= *radius,
        DomainSpec::Subtree { edges } => {
            let tree = space.as_tree().expect("validated");
            match tree.canonical(match p {
                Point::Tree(tp) => tp,
                _ => unreachable!("validated"),
            }) {
                TreePoint::Edge { edge, .. } => edges.contains(&edge),
                TreePoint::Vertex(v) => tree.incident_edges(v).any(|e| edges.contains(&e)),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{EdgeSpec, RTree};

    #[test]
    fn whole_space_contains_everything() {
        let s = Space::hyperbolic();
        assert!(s.domain_contains(&DomainSpec::Whole, &Point::hyperbolic(0.9, 0.0)).unwrap());
    }

    #[test]
    fn box_bounds() {
        let s = Space::l2box(3, 10.0).unwrap();
        assert!(s.domain_contains(&DomainSpec::Box, &Point::l2box([5.0, 50.0, 500.0])).unwrap());
        // a point outside the box is not a point of the space at all
        assert!(s.domain_contains(&DomainSpec::Box, &Point::l2box([11.0, 0.0, 0.0])).is_err());
        assert!(Space::euclidean(2).unwrap().validate_domain(&DomainSpec::Box).is_err());
    }

    #[test]
    fn segment_as_one_dimensional_ball() {
        let s = Space::euclidean(1).unwrap();
        let d = DomainSpec::Ball {
            center: Point::euclidean([5.0]),
            radius: 5.0,
        };
        assert!(s.domain_contains(&d, &Point::euclidean([0.0])).unwrap());
        assert!(s.domain_contains(&d, &Point::euclidean([10.0])).unwrap());
        assert!(!s.domain_contains(&d, &Point::euclidean([10.5])).unwrap());
    }

    #[test]
    fn subtree_membership_and_connectivity() {
        let t = RTree::new(4, &[EdgeSpec(0, 1, 1.0), EdgeSpec(1, 2, 1.0), EdgeSpec(2, 3, 1.0)], None).unwrap();
        let s = Space::tree(t);
        let d = DomainSpec::Subtree { edges: vec![0, 1] };
        assert!(s.domain_contains(&d, &Point::vertex(2)).unwrap());
        assert!(!s.domain_contains(&d, &Point::vertex(3)).unwrap());
        assert!(!s.domain_contains(&d, &Point::on_edge(2, 0.5)).unwrap());
        assert!(s.validate_domain(&DomainSpec::Subtree { edges: vec![0, 2] }).is_err());
    }
}
