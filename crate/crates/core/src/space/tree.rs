//! Metric trees (ℝ-trees realized as weighted simplicial trees, optionally
//! with one half-infinite ray edge).
//!
//! All distances and geodesic walks are evaluated in exact rational
//! arithmetic over the `f64` inputs (every finite `f64` is a dyadic rational)
//! and only rounded to `f64` at the very end. Consequences relied on
//! elsewhere: a point produced by walking along `[x, y]` lies on `[x, y]`
//! exactly, and with dyadic edge lengths and step sizes every offset the
//! game engine produces is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::point::TreePoint;
use crate::error::{invalid, Result};

/// Largest vertex count accepted from a configuration.
pub const MAX_VERTICES: usize = 1 << 16;

/// Edge `(a, b, length)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec(pub usize, pub usize, pub f64);

#[derive(Debug, Clone)]
struct Edge {
    a: usize,
    /// `None` for the ray edge.
    b: Option<usize>,
    length: f64,
    exact: Option<BigRational>,
}

/// A finite weighted tree plus at most one unbounded ray edge.
#[derive(Debug, Clone)]
pub struct RTree {
    n_vertices: usize,
    edges: Vec<Edge>,
    ray_anchor: Option<usize>,
    /// `(edge, neighbour)`; the ray edge appears with neighbour `None`.
    adjacency: Vec<Vec<(usize, Option<usize>)>>,
    parent: Vec<Option<(usize, usize)>>,
    level: Vec<usize>,
    depth: Vec<BigRational>,
}

pub(crate) fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// One straight piece of a tree geodesic, in the edge's own offset coordinates.
#[derive(Debug, Clone)]
struct Leg {
    edge: usize,
    from: BigRational,
    to: BigRational,
}

impl RTree {
    /// Builds and validates a tree: vertex ids in range, positive finite
    /// lengths, connected and acyclic, ray anchored at an existing vertex.
    pub fn new(n_vertices: usize, edges: &[EdgeSpec], ray: Option<usize>) -> Result<Self> {
        if n_vertices == 0 {
            return Err(invalid("tree needs at least one vertex"));
        }
        if n_vertices > MAX_VERTICES {
            return Err(invalid(format!("tree has more than {MAX_VERTICES} vertices")));
        }
        if edges.len() + 1 != n_vertices {
            return Err(invalid(format!(
                "a tree on {n_vertices} vertices needs {} edges, got {}",
                n_vertices - 1,
                edges.len()
            )));
        }
        let mut built = Vec::with_capacity(edges.len() + 1);
        let mut adjacency = vec![Vec::new(); n_vertices];
        for (id, &EdgeSpec(a, b, length)) in edges.iter().enumerate() {
            if a >= n_vertices || b >= n_vertices {
                return Err(invalid(format!("edge {id} references a missing vertex")));
            }
            if a == b {
                return Err(invalid(format!("edge {id} is a loop")));
            }
            if !(length.is_finite() && length > 0.0) {
                return Err(invalid(format!("edge {id} has non-positive or non-finite length")));
            }
            built.push(Edge {
                a,
                b: Some(b),
                length,
                exact: Some(exact(length)),
            });
            adjacency[a].push((id, Some(b)));
            adjacency[b].push((id, Some(a)));
        }
        if let Some(anchor) = ray {
            if anchor >= n_vertices {
                return Err(invalid("ray anchor references a missing vertex"));
            }
            let id = built.len();
            built.push(Edge {
                a: anchor,
                b: None,
                length: f64::INFINITY,
                exact: None,
            });
            adjacency[anchor].push((id, None));
        }

        // BFS from vertex 0; with n - 1 edges, reaching every vertex proves
        // the graph is a tree.
        let mut parent = vec![None; n_vertices];
        let mut level = vec![usize::MAX; n_vertices];
        let mut depth = vec![BigRational::zero(); n_vertices];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut seen = 1usize;
        while let Some(u) = queue.pop_front() {
            for &(e, nb) in &adjacency[u] {
                let Some(v) = nb else { continue };
                if level[v] != usize::MAX {
                    continue;
                }
                level[v] = level[u] + 1;
                parent[v] = Some((u, e));
                depth[v] = &depth[u] + built[e].exact.as_ref().expect("bounded edge");
                seen += 1;
                queue.push_back(v);
            }
        }
        if seen != n_vertices {
            return Err(invalid("edge graph is not connected"));
        }

        Ok(RTree {
            n_vertices,
            edges: built,
            ray_anchor: ray,
            adjacency,
            parent,
            level,
            depth,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices
    }

    /// Number of edges including the ray edge.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ray_edge(&self) -> Option<usize> {
        self.ray_anchor.map(|_| self.edges.len() - 1)
    }

    pub fn ray_anchor(&self) -> Option<usize> {
        self.ray_anchor
    }

    pub fn edge_length(&self, edge: usize) -> Option<f64> {
        self.edges.get(edge).map(|e| e.length)
    }

    /// Endpoints of an edge; the second is `None` for the ray edge.
    pub fn edge_endpoints(&self, edge: usize) -> Option<(usize, Option<usize>)> {
        self.edges.get(edge).map(|e| (e.a, e.b))
    }

    /// Bounded edges as `(a, b, length)`.
    pub fn edge_specs(&self) -> Vec<EdgeSpec> {
        self.edges
            .iter()
            .filter_map(|e| e.b.map(|b| EdgeSpec(e.a, b, e.length)))
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn incident_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|&(e, _)| e)
    }

    pub fn validate(&self, p: &TreePoint) -> Result<()> {
        match *p {
            TreePoint::Vertex(v) if v < self.n_vertices => Ok(()),
            TreePoint::Vertex(v) => Err(invalid(format!("vertex {v} does not exist"))),
            TreePoint::Edge { edge, offset } => {
                let e = self
                    .edges
                    .get(edge)
                    .ok_or_else(|| invalid(format!("edge {edge} does not exist")))?;
                if !offset.is_finite() || offset < 0.0 || offset > e.length {
                    return Err(invalid(format!(
                        "offset {offset} outside [0, {}] on edge {edge}",
                        e.length
                    )));
                }
                Ok(())
            }
        }
    }

    /// Canonical form: endpoints of edges become vertices.
    pub fn canonical(&self, p: &TreePoint) -> TreePoint {
        match *p {
            TreePoint::Edge { edge, offset } => {
                let e = &self.edges[edge];
                if offset == 0.0 {
                    TreePoint::Vertex(e.a)
                } else if offset == e.length {
                    TreePoint::Vertex(e.b.expect("bounded edge has a far endpoint"))
                } else {
                    *p
                }
            }
            v => v,
        }
    }

    fn exact_len(&self, edge: usize) -> Option<&BigRational> {
        self.edges[edge].exact.as_ref()
    }

    fn vertex_path(&self, u: usize, v: usize) -> (Vec<(usize, usize, usize)>, BigRational) {
        // Hops (from, edge, to) from u to v through their lowest common ancestor.
        let (mut x, mut y) = (u, v);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while self.level[x] > self.level[y] {
            let (p, e) = self.parent[x].expect("non-root has a parent");
            up.push((x, e, p));
            x = p;
        }
        while self.level[y] > self.level[x] {
            let (p, e) = self.parent[y].expect("non-root has a parent");
            down.push((p, e, y));
            y = p;
        }
        while x != y {
            let (px, ex) = self.parent[x].expect("non-root has a parent");
            let (py, ey) = self.parent[y].expect("non-root has a parent");
            up.push((x, ex, px));
            down.push((py, ey, y));
            x = px;
            y = py;
        }
        let lca = x;
        let dist = &self.depth[u] + &self.depth[v] - &self.depth[lca] * BigInt::from(2);
        down.reverse();
        up.extend(down);
        (up, dist)
    }

    fn vertex_distance(&self, u: usize, v: usize) -> BigRational {
        let lca = {
            let (mut x, mut y) = (u, v);
            while self.level[x] > self.level[y] {
                x = self.parent[x].expect("non-root").0;
            }
            while self.level[y] > self.level[x] {
                y = self.parent[y].expect("non-root").0;
            }
            while x != y {
                x = self.parent[x].expect("non-root").0;
                y = self.parent[y].expect("non-root").0;
            }
            x
        };
        &self.depth[u] + &self.depth[v] - &self.depth[lca] * BigInt::from(2)
    }

    /// Ways out of the (closed) edge containing `p`: `(vertex, distance to it)`.
    fn exits(&self, p: &TreePoint) -> Vec<(usize, BigRational)> {
        match *p {
            TreePoint::Vertex(v) => vec![(v, BigRational::zero())],
            TreePoint::Edge { edge, offset } => {
                let e = &self.edges[edge];
                let s = exact(offset);
                match (e.b, &e.exact) {
                    (Some(b), Some(len)) => vec![(e.a, s.clone()), (b, len - s)],
                    _ => vec![(e.a, s)],
                }
            }
        }
    }

    /// Exact distance between two (validated) points.
    pub fn exact_distance(&self, p: &TreePoint, q: &TreePoint) -> BigRational {
        let p = self.canonical(p);
        let q = self.canonical(q);
        if let (TreePoint::Edge { edge: e1, offset: s }, TreePoint::Edge { edge: e2, offset: t }) = (p, q) {
            if e1 == e2 {
                return (exact(s) - exact(t)).abs();
            }
        }
        self.best_route(&p, &q).4
    }

    /// Cheapest `(exit of p, leg p, exit of q, leg q, total)`; unique for a
    /// tree since the geodesic leaves each edge through exactly one end.
    fn best_route(
        &self,
        p: &TreePoint,
        q: &TreePoint,
    ) -> (usize, BigRational, usize, BigRational, BigRational) {
        let mut best: Option<(usize, BigRational, usize, BigRational, BigRational)> = None;
        for (u, lu) in self.exits(p) {
            for (v, lv) in self.exits(q) {
                let total = &lu + &lv + self.vertex_distance(u, v);
                if best.as_ref().map_or(true, |b| total < b.4) {
                    best = Some((u, lu.clone(), v, lv, total));
                }
            }
        }
        best.expect("every point has an exit")
    }

    pub fn distance(&self, p: &TreePoint, q: &TreePoint) -> f64 {
        to_f64(&self.exact_distance(p, q))
    }

    fn offset_of_vertex(&self, edge: usize, v: usize) -> BigRational {
        let e = &self.edges[edge];
        if e.a == v {
            BigRational::zero()
        } else {
            self.exact_len(edge).expect("bounded edge").clone()
        }
    }

    fn legs(&self, p: &TreePoint, q: &TreePoint) -> Vec<Leg> {
        let p = self.canonical(p);
        let q = self.canonical(q);
        if let (TreePoint::Edge { edge: e1, offset: s }, TreePoint::Edge { edge: e2, offset: t }) = (p, q) {
            if e1 == e2 {
                return vec![Leg {
                    edge: e1,
                    from: exact(s),
                    to: exact(t),
                }];
            }
        }
        let (u, _, v, _, _) = self.best_route(&p, &q);
        let mut legs = Vec::new();
        if let TreePoint::Edge { edge, offset } = p {
            legs.push(Leg {
                edge,
                from: exact(offset),
                to: self.offset_of_vertex(edge, u),
            });
        }
        let (hops, _) = self.vertex_path(u, v);
        for (from, edge, to) in hops {
            legs.push(Leg {
                edge,
                from: self.offset_of_vertex(edge, from),
                to: self.offset_of_vertex(edge, to),
            });
        }
        if let TreePoint::Edge { edge, offset } = q {
            legs.push(Leg {
                edge,
                from: self.offset_of_vertex(edge, v),
                to: exact(offset),
            });
        }
        legs
    }

    fn point_on_edge(&self, edge: usize, offset: &BigRational) -> TreePoint {
        let off = to_f64(offset);
        self.canonical(&TreePoint::Edge {
            edge,
            offset: off.clamp(0.0, self.edges[edge].length),
        })
    }

    /// Point at exact distance `s` from `p` along `[p, q]`, clamped to the segment.
    pub fn walk_exact(&self, p: &TreePoint, q: &TreePoint, s: &BigRational) -> TreePoint {
        if !s.is_positive() {
            return self.canonical(p);
        }
        let mut remaining = s.clone();
        for leg in self.legs(p, q) {
            let len = (&leg.to - &leg.from).abs();
            if remaining < len {
                let offset = if leg.to >= leg.from {
                    &leg.from + &remaining
                } else {
                    &leg.from - &remaining
                };
                return self.point_on_edge(leg.edge, &offset);
            }
            remaining -= len;
        }
        self.canonical(q)
    }

    /// Point at distance `s` from `p` toward `q`.
    pub fn walk(&self, p: &TreePoint, q: &TreePoint, s: f64) -> TreePoint {
        self.walk_exact(p, q, &exact(s.max(0.0)))
    }

    /// Point `z` of `[p, q]` with `d(p, z) = t d(p, q)`.
    pub fn interpolate(&self, p: &TreePoint, q: &TreePoint, t: f64) -> TreePoint {
        if t >= 1.0 {
            return self.canonical(q);
        }
        let s = exact(t.max(0.0)) * self.exact_distance(p, q);
        self.walk_exact(p, q, &s)
    }

    /// Nearest point of `[a, b]` to `p`: the branch point (median) of the
    /// tripod spanned by `p, a, b`, at distance `(p|b)_a` from `a`; the
    /// distance from `p` to it is `(a|b)_p`. Both values are exact.
    pub fn project(&self, p: &TreePoint, a: &TreePoint, b: &TreePoint) -> (TreePoint, BigRational) {
        let dap = self.exact_distance(a, p);
        let dab = self.exact_distance(a, b);
        let dpb = self.exact_distance(p, b);
        let two = BigRational::from_integer(BigInt::from(2));
        let along = (&dap + &dab - &dpb) / &two;
        let off = (&dap + &dpb - &dab) / &two;
        (self.walk_exact(a, b, &along), off)
    }

    /// True when `[apex, y]` and `[apex, z]` share a nondegenerate initial piece.
    pub fn share_direction(&self, apex: &TreePoint, y: &TreePoint, z: &TreePoint) -> bool {
        let dy = self.exact_distance(apex, y);
        let dz = self.exact_distance(apex, z);
        let dyz = self.exact_distance(y, z);
        (dy + dz - dyz).is_positive()
    }

    /// Continuation of `[x, y]` by `s` beyond `y`, provided it is unique:
    /// `y` interior to an edge, or a vertex of degree two.
    pub fn extend(&self, x: &TreePoint, y: &TreePoint, s: f64) -> Option<TreePoint> {
        let x = self.canonical(x);
        let y = self.canonical(y);
        let legs = self.legs(&x, &y);
        let last = legs.last()?;
        let mut edge = last.edge;
        let mut forward = last.to >= last.from;
        let mut offset = last.to.clone();
        let mut remaining = exact(s.max(0.0));
        loop {
            let e = &self.edges[edge];
            let room = match (forward, &e.exact) {
                (true, Some(len)) => len - &offset,
                (true, None) => {
                    return Some(self.point_on_edge(edge, &(&offset + &remaining)));
                }
                (false, _) => offset.clone(),
            };
            if remaining <= room {
                let o = if forward {
                    &offset + &remaining
                } else {
                    &offset - &remaining
                };
                return Some(self.point_on_edge(edge, &o));
            }
            remaining -= room;
            let v = if forward { e.b? } else { e.a };
            if self.adjacency[v].len() != 2 {
                return None;
            }
            let &(next, _) = self.adjacency[v].iter().find(|&&(id, _)| id != edge)?;
            edge = next;
            let ne = &self.edges[edge];
            forward = ne.a == v;
            offset = if forward {
                BigRational::zero()
            } else {
                ne.exact.clone()?
            };
        }
    }

    /// Points at distance exactly `radius` from `p` along every branch, plus
    /// every leaf reached before that distance. Order is deterministic.
    pub fn sphere(&self, p: &TreePoint, radius: f64) -> Vec<TreePoint> {
        let p = self.canonical(p);
        let r = exact(radius.max(0.0));
        let mut out = Vec::new();
        match p {
            TreePoint::Vertex(v) => self.sphere_from_vertex(v, None, r, &mut out),
            TreePoint::Edge { edge, offset } => {
                let e = &self.edges[edge];
                let s = exact(offset);
                // Toward the first endpoint.
                if r < s {
                    out.push(self.point_on_edge(edge, &(&s - &r)));
                } else {
                    self.sphere_from_vertex(e.a, Some(edge), &r - &s, &mut out);
                }
                // Toward the far endpoint (or out along the ray).
                match (&e.exact, e.b) {
                    (Some(len), Some(b)) => {
                        let room = len - &s;
                        if r < room {
                            out.push(self.point_on_edge(edge, &(&s + &r)));
                        } else {
                            self.sphere_from_vertex(b, Some(edge), &r - &room, &mut out);
                        }
                    }
                    _ => out.push(self.point_on_edge(edge, &(&s + &r))),
                }
            }
        }
        out
    }

    fn sphere_from_vertex(&self, v: usize, came_by: Option<usize>, r: BigRational, out: &mut Vec<TreePoint>) {
        if r.is_zero() {
            out.push(TreePoint::Vertex(v));
            return;
        }
        let mut any = false;
        for &(edge, nb) in &self.adjacency[v] {
            if Some(edge) == came_by {
                continue;
            }
            any = true;
            let from = self.offset_of_vertex(edge, v);
            match (nb, &self.edges[edge].exact) {
                (Some(w), Some(len)) => {
                    if r < *len {
                        let o = if from.is_zero() { r.clone() } else { len - &r };
                        out.push(self.point_on_edge(edge, &o));
                    } else {
                        self.sphere_from_vertex(w, Some(edge), &r - len, out);
                    }
                }
                _ => out.push(self.point_on_edge(edge, &r)),
            }
        }
        if !any {
            out.push(TreePoint::Vertex(v));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tripod() -> RTree {
        // center 0, leaves 1, 2, 3
        RTree::new(4, &[EdgeSpec(0, 1, 1.0), EdgeSpec(0, 2, 1.0), EdgeSpec(0, 3, 1.0)], None).unwrap()
    }

    #[test]
    fn rejects_cycles_and_bad_lengths() {
        assert!(RTree::new(3, &[EdgeSpec(0, 1, 1.0), EdgeSpec(1, 0, 1.0)], None).is_err());
        assert!(RTree::new(2, &[EdgeSpec(0, 1, -1.0)], None).is_err());
        assert!(RTree::new(2, &[EdgeSpec(0, 1, f64::NAN)], None).is_err());
        assert!(RTree::new(2, &[EdgeSpec(0, 2, 1.0)], None).is_err());
        assert!(RTree::new(2, &[EdgeSpec(0, 1, 1.0)], Some(5)).is_err());
        assert!(RTree::new(usize::MAX, &[], None).is_err());
    }

    #[test]
    fn leaf_to_leaf_through_center() {
        let t = tripod();
        assert_eq!(t.distance(&TreePoint::Vertex(1), &TreePoint::Vertex(2)), 2.0);
        let mid = t.interpolate(&TreePoint::Vertex(1), &TreePoint::Vertex(2), 0.5);
        assert_eq!(mid, TreePoint::Vertex(0));
    }

    #[test]
    fn ray_distances_add_along_anchor() {
        let t = RTree::new(2, &[EdgeSpec(0, 1, 2.0)], Some(0)).unwrap();
        let ray = t.ray_edge().unwrap();
        let far = TreePoint::Edge { edge: ray, offset: 10.0 };
        assert_eq!(t.distance(&TreePoint::Vertex(1), &far), 12.0);
        assert_eq!(
            t.walk(&TreePoint::Vertex(1), &far, 5.0),
            TreePoint::Edge { edge: ray, offset: 3.0 }
        );
        assert_eq!(
            t.extend(&TreePoint::Vertex(1), &far, 4.0),
            Some(TreePoint::Edge { edge: ray, offset: 14.0 })
        );
    }

    #[test]
    fn sphere_on_tripod_reaches_all_leaves() {
        let t = tripod();
        let s = t.sphere(&TreePoint::Vertex(1), 3.0);
        assert_eq!(s, vec![TreePoint::Vertex(2), TreePoint::Vertex(3)]);
        let s = t.sphere(&TreePoint::Vertex(0), 0.5);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn projection_is_the_median() {
        let t = tripod();
        let (q, d) = t.project(&TreePoint::Vertex(3), &TreePoint::Vertex(1), &TreePoint::Vertex(2));
        assert_eq!(q, TreePoint::Vertex(0));
        assert_eq!(to_f64(&d), 1.0);
    }
}
