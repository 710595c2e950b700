use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DomainSpec, Point, Space, TreePoint};

/// Hyperbolic sampling radius cap: points further than this from the origin
/// lose too much precision in double-precision disk coordinates.
pub const MAX_HYPERBOLIC_RADIUS: f64 = 12.0;

/// Seeded point generator. `scale` sets the extent of the sampled region:
/// the cube `[-scale, scale]ⁿ` in ℝⁿ, the disk of hyperbolic radius `scale/2`
/// (capped at [`MAX_HYPERBOLIC_RADIUS`]), the box clipped at `scale`, and
/// tree edges with the ray truncated to length `scale`.
#[derive(Debug, Clone)]
pub struct PointSampler {
    rng: ChaCha8Rng,
    scale: f64,
}

impl PointSampler {
    pub fn new(seed: u64, scale: f64) -> Self {
        PointSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            scale,
        }
    }

    /// Independent generator for trial `stream` of the same seed, so trials
    /// can be evaluated in any order with identical results.
    pub fn for_stream(seed: u64, scale: f64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        PointSampler { rng, scale }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn sample(&mut self, space: &Space) -> Point {
        let scale = self.scale;
        match space {
            Space::Euclidean { dim } => Point::Euclidean((0..*dim).map(|_| self.rng.gen_range(-scale..=scale)).collect()),
            Space::Hyperbolic => {
                let rho = self.rng.gen::<f64>() * (0.5 * scale).min(MAX_HYPERBOLIC_RADIUS);
                let theta = self.rng.gen::<f64>() * std::f64::consts::TAU;
                let r = (0.5 * rho).tanh();
                Point::Hyperbolic([r * theta.cos(), r * theta.sin()])
            }
            Space::L2Box { dim, base } => {
                let mut bound = 1.0;
                Point::L2Box(
                    (0..*dim)
                        .map(|_| {
                            bound *= base;
                            self.rng.gen::<f64>() * bound.min(scale)
                        })
                        .collect(),
                )
            }
            Space::Tree(t) => {
                let edges: Vec<usize> = (0..t.edge_count()).collect();
                self.sample_tree_edges(space, &edges)
            }
        }
    }

    fn sample_tree_edges(&mut self, space: &Space, edges: &[usize]) -> Point {
        let t = space.as_tree().expect("tree space");
        let scale = self.scale;
        let len = |e: usize| t.edge_length(e).map_or(0.0, |l| l.min(scale));
        let total: f64 = edges.iter().map(|&e| len(e)).sum();
        let mut pick = self.rng.gen::<f64>() * total;
        for &e in edges {
            let l = len(e);
            if pick <= l || e == *edges.last().expect("nonempty") {
                let offset = pick.clamp(0.0, l);
                return Point::Tree(t.canonical(&TreePoint::Edge { edge: e, offset }));
            }
            pick -= l;
        }
        Point::vertex(0)
    }

    /// Sample from `domain`; falls back to a fixed in-domain point if
    /// rejection sampling keeps failing.
    pub fn sample_in(&mut self, space: &Space, domain: &DomainSpec) -> Point {
        match domain {
            DomainSpec::Whole | DomainSpec::Box => self.sample(space),
            DomainSpec::Subtree { edges } => self.sample_tree_edges(space, edges),
            DomainSpec::Ball { center, radius } => {
                for _ in 0..1000 {
                    let p = match space {
                        Space::Euclidean { dim } => {
                            let c = center.coords().unwrap_or(&[]);
                            Point::Euclidean(
                                (0..*dim).map(|i| c[i] + self.rng.gen_range(-*radius..=*radius)).collect(),
                            )
                        }
                        Space::Hyperbolic => {
                            let theta = self.rng.gen::<f64>() * std::f64::consts::TAU;
                            let s = self.rng.gen::<f64>() * radius;
                            match space.shoot(center, center, theta, s) {
                                Ok(p) => p,
                                Err(_) => continue,
                            }
                        }
                        _ => self.sample(space),
                    };
                    if space.domain_contains(domain, &p).unwrap_or(false) {
                        return p;
                    }
                }
                center.clone()
            }
        }
    }
}
