use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::space::{Point, Space, SpaceSpec};

/// How a curve continues past its last sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Tail {
    /// The curve ends at its last sample.
    #[default]
    None,
    /// The last piece continues as a geodesic at the same speed.
    Geodesic,
}

/// A parametric path given by ordered `(t, point)` samples, interpolated
/// geodesically (proportionally to the parameter) between consecutive samples.
#[derive(Debug, Clone)]
pub struct Curve {
    space: Space,
    params: Vec<f64>,
    points: Vec<Point>,
    tail: Tail,
}

impl Curve {
    /// Parameters must be finite, nonnegative and strictly increasing.
    pub fn new(space: Space, samples: Vec<(f64, Point)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("a curve needs at least one sample"));
        }
        let mut params = Vec::with_capacity(samples.len());
        let mut points = Vec::with_capacity(samples.len());
        for (t, p) in samples {
            if !(t.is_finite() && t >= 0.0) {
                return Err(invalid(format!("curve parameter {t} must be finite and nonnegative")));
            }
            if let Some(&last) = params.last() {
                if t <= last {
                    return Err(invalid(format!("curve parameters must increase strictly ({last} then {t})")));
                }
            }
            space.validate(&p)?;
            params.push(t);
            points.push(p);
        }
        Ok(Curve {
            space,
            params,
            points,
            tail: Tail::None,
        })
    }

    /// Piecewise-geodesic curve through `points`, parameterized by arc
    /// length from 0. Repeated consecutive points are dropped.
    pub fn from_polyline(space: Space, points: Vec<Point>) -> Result<Self> {
        let mut samples: Vec<(f64, Point)> = Vec::with_capacity(points.len());
        let mut t = 0.0;
        for p in points {
            if let Some((_, prev)) = samples.last() {
                let d = space.distance(prev, &p)?;
                if d == 0.0 {
                    continue;
                }
                t += d;
            }
            samples.push((t, p));
        }
        Curve::new(space, samples)
    }

    /// Curve through `points` with `γ(i·step) = points[i]`.
    pub fn at_speed(space: Space, points: Vec<Point>, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(invalid("parameter step must be positive"));
        }
        let samples = points.into_iter().enumerate().map(|(i, p)| (i as f64 * step, p)).collect();
        Curve::new(space, samples)
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.params[0]
    }

    /// Last sampled parameter.
    pub fn end(&self) -> f64 {
        *self.params.last().expect("nonempty")
    }

    /// Largest parameter at which the curve can be evaluated.
    pub fn reach(&self) -> f64 {
        match self.tail {
            Tail::Geodesic if self.len() >= 2 => f64::INFINITY,
            _ => self.end(),
        }
    }

    pub fn eval(&self, t: f64) -> Result<Point> {
        if !(t >= self.start()) {
            return Err(invalid(format!("parameter {t} precedes the curve start {}", self.start())));
        }
        let n = self.len();
        if t > self.end() {
            if self.tail == Tail::Geodesic && n >= 2 {
                let (t0, t1) = (self.params[n - 2], self.params[n - 1]);
                let (p0, p1) = (&self.points[n - 2], &self.points[n - 1]);
                let speed = self.space.distance(p0, p1)? / (t1 - t0);
                return self
                    .space
                    .extend_geodesic(p0, p1, (t - t1) * speed)
                    .map_err(|_| Error::InsufficientCurve { t });
            }
            return Err(Error::InsufficientCurve { t });
        }
        let i = match self.params.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => return Ok(self.points[i].clone()),
            Err(i) => i - 1,
        };
        let f = ((t - self.params[i]) / (self.params[i + 1] - self.params[i])).clamp(0.0, 1.0);
        self.space.geodesic_point(&self.points[i], &self.points[i + 1], f)
    }

    /// Total length of the sampled part (sum of consecutive distances).
    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| self.space.distance_unchecked(&w[0], &w[1]))
            .sum()
    }
}

/// Named generators that can stand in for (or extend) explicit samples in a
/// curve file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveGenerator {
    /// Continue the last piece geodesically.
    GeodesicExtension,
    /// The piecewise-linear ℓ₂ box curve through the corners `x⁰, …, xᴺ`.
    L2Example {
        dim: usize,
        #[serde(default = "ten")]
        base: f64,
        #[serde(default)]
        refinement: usize,
    },
}

fn ten() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub t: f64,
    pub point: Point,
}

/// On-disk form of a curve: space, sample table, optional generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub space: SpaceSpec,
    #[serde(default)]
    pub samples: Vec<CurveSample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<CurveGenerator>,
}

/// Upper bound on `refinement` accepted from a curve file.
pub const MAX_REFINEMENT: usize = 10_000;

/// Upper bound on the number of coordinates a generated ℓ₂ curve may hold.
const MAX_L2_COORDINATES: usize = 1 << 24;

impl CurveFile {
    pub fn from_curve(curve: &Curve) -> Self {
        CurveFile {
            space: curve.space.spec(),
            samples: curve
                .params
                .iter()
                .zip(&curve.points)
                .map(|(&t, p)| CurveSample { t, point: p.clone() })
                .collect(),
            generator: match curve.tail {
                Tail::Geodesic => Some(CurveGenerator::GeodesicExtension),
                Tail::None => None,
            },
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve files serialize")
    }

    /// Builds the curve described by the file.
    pub fn build(&self) -> Result<Curve> {
        let space = Space::from_spec(&self.space)?;
        match &self.generator {
            Some(CurveGenerator::L2Example { dim, base, refinement }) => {
                if !self.samples.is_empty() {
                    return Err(invalid("the l2-example generator does not take explicit samples"));
                }
                if *refinement > MAX_REFINEMENT {
                    return Err(invalid(format!("refinement above {MAX_REFINEMENT}")));
                }
                if space.spec() != (SpaceSpec::L2box { dim: *dim, base: *base }) {
                    return Err(invalid("space does not match the l2-example generator"));
                }
                if dim.saturating_mul(*dim).saturating_mul(refinement + 1) > MAX_L2_COORDINATES {
                    return Err(invalid("l2-example curve too large"));
                }
                super::l2::l2_example_curve(*dim, *base, *refinement)
            }
            other => {
                let samples = self.samples.iter().map(|s| (s.t, s.point.clone())).collect();
                let curve = Curve::new(space, samples)?;
                Ok(match other {
                    Some(CurveGenerator::GeodesicExtension) => curve.with_tail(Tail::Geodesic),
                    _ => curve,
                })
            }
        }
    }
}
