use serde::{Deserialize, Serialize};

/// A location in one of the supported spaces. The variant must agree with
/// the kind of the [`Space`](super::Space) it is used with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Point {
    Euclidean(Vec<f64>),
    /// Poincaré-disk coordinates, strictly inside the unit disk.
    Hyperbolic([f64; 2]),
    Tree(TreePoint),
    #[serde(rename = "l2box")]
    L2Box(Vec<f64>),
}

/// A point of a metric tree: either a vertex or an interior point of an edge
/// given by its offset from the edge's first endpoint (the anchor, for the
/// unbounded ray edge).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreePoint {
    Vertex(usize),
    Edge { edge: usize, offset: f64 },
}

impl Point {
    pub fn euclidean(coords: impl Into<Vec<f64>>) -> Self {
        Point::Euclidean(coords.into())
    }

    pub fn hyperbolic(x: f64, y: f64) -> Self {
        Point::Hyperbolic([x, y])
    }

    pub fn vertex(v: usize) -> Self {
        Point::Tree(TreePoint::Vertex(v))
    }

    pub fn on_edge(edge: usize, offset: f64) -> Self {
        Point::Tree(TreePoint::Edge { edge, offset })
    }

    pub fn l2box(coords: impl Into<Vec<f64>>) -> Self {
        Point::L2Box(coords.into())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Point::Euclidean(_) => "euclidean",
            Point::Hyperbolic(_) => "hyperbolic",
            Point::Tree(_) => "rtree",
            Point::L2Box(_) => "l2box",
        }
    }

    /// Coordinate vector for the vector-valued variants.
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Euclidean(v) | Point::L2Box(v) => Some(v),
            Point::Hyperbolic(v) => Some(v),
            Point::Tree(_) => None,
        }
    }
}

/// Geodesic segment `[a, b]` between two points of one space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }
}
