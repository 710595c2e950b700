use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curves::Curve;
use crate::error::{invalid, Error, Result};
use crate::space::{DomainSpec, Point, Space, TreePoint};

/// What the man sees when choosing `M_{n+1}`.
#[derive(Debug, Clone, Copy)]
pub struct MoveContext<'a> {
    pub space: &'a Space,
    pub domain: &'a DomainSpec,
    /// Current step `n`.
    pub step: usize,
    pub d: f64,
    /// The lion's new position `L_{n+1}`.
    pub lion: &'a Point,
    /// The man's current position `M_n`.
    pub man: &'a Point,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ManMove {
    To(Point),
    /// No admissible move was found; the man stays put.
    Stay,
}

/// A rule producing the man's next position. Moves longer than `D` are
/// clamped by the engine; moves leaving the domain are faults.
pub trait ManStrategy {
    fn name(&self) -> String;

    /// Starting point prescribed by the strategy, if any.
    fn start(&self) -> Option<Point> {
        None
    }

    fn next(&mut self, ctx: &MoveContext<'_>) -> Result<ManMove>;
}

pub struct Stationary;

impl ManStrategy for Stationary {
    fn name(&self) -> String {
        "stationary".into()
    }

    fn next(&mut self, ctx: &MoveContext<'_>) -> Result<ManMove> {
        Ok(ManMove::To(ctx.man.clone()))
    }
}

/// `M_n = γ((n+2)D + 1)` along a directional curve; with `L₀ = γ(0)` the
/// gap never drops below `D + 1`.
pub struct Directional {
    curve: Curve,
    d: f64,
}

pub fn man_directional_strategy(curve: Curve, d: f64) -> Result<Directional> {
    if !(d.is_finite() && d > 0.0) {
        return Err(invalid("step size D must be positive"));
    }
    Ok(Directional { curve, d })
}

impl Directional {
    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    /// Parameter of `M_n`.
    pub fn param(&self, n: usize) -> f64 {
        (n as f64 + 2.0) * self.d + 1.0
    }
}

impl ManStrategy for Directional {
    fn name(&self) -> String {
        "directional".into()
    }

    fn start(&self) -> Option<Point> {
        self.curve.eval(self.param(0)).ok()
    }

    fn next(&mut self, ctx: &MoveContext<'_>) -> Result<ManMove> {
        Ok(ManMove::To(self.curve.eval(self.param(ctx.step + 1))?))
    }
}

/// Candidate moves of length `d` from `man`, the first pointing directly
/// away from `lion`, the rest at the given angles from that direction.
/// Trees ignore the angles and use every direction out of `man`.
pub fn candidate_moves(space: &Space, man: &Point, lion: &Point, d: f64, angles: &[f64]) -> Vec<Point> {
    match (space, man) {
        (Space::Euclidean { .. } | Space::L2Box { .. }, _) => {
            let m = man.coords().unwrap_or(&[]);
            let l = lion.coords().unwrap_or(&[]);
            let diff: Vec<f64> = m.iter().zip(l).map(|(a, b)| a - b).collect();
            let norm = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
            let u: Vec<f64> = if norm > 0.0 {
                diff.iter().map(|x| x / norm).collect()
            } else {
                let mut e = vec![0.0; m.len()];
                e[0] = 1.0;
                e
            };
            let v = crate::space::euclid::orthogonal_unit(&u);
            let mut seen_dirs: Vec<Vec<f64>> = Vec::new();
            let mut out = Vec::new();
            for &theta in angles {
                let dir: Vec<f64> = match &v {
                    Some(v) => u.iter().zip(v).map(|(a, b)| theta.cos() * a + theta.sin() * b).collect(),
                    // one dimension: only forward and backward
                    None => u.iter().map(|a| if theta.cos() >= 0.0 { *a } else { -a }).collect(),
                };
                if seen_dirs.iter().any(|s| s == &dir) {
                    continue;
                }
                let p: Vec<f64> = m.iter().zip(&dir).map(|(a, b)| a + d * b).collect();
                seen_dirs.push(dir);
                out.push(match space {
                    Space::Euclidean { .. } => Point::Euclidean(p),
                    _ => Point::L2Box(p),
                });
            }
            out
        }
        (Space::Hyperbolic, _) => angles
            .iter()
            .filter_map(|&theta| space.shoot(man, lion, PI + theta, d).ok())
            .collect(),
        (Space::Tree(t), Point::Tree(tp)) => t.sphere(tp, d).into_iter().map(Point::Tree).filter(|p| p != man).collect(),
        _ => Vec::new(),
    }
}

fn admissible(ctx: &MoveContext<'_>, p: &Point) -> bool {
    ctx.space.domain_contains(ctx.domain, p).unwrap_or(false)
}

/// Among `directions` candidate moves of length `D`, the in-domain one
/// farthest from the lion (earliest candidate on ties). Staying put counts as
/// a last candidate, so a cornered man does not step toward the lion.
pub struct Greedy {
    directions: usize,
}

pub fn man_greedy_strategy(directions: usize) -> Result<Greedy> {
    if directions < 2 {
        return Err(invalid("greedy strategy needs at least 2 directions"));
    }
    Ok(Greedy { directions })
}

impl ManStrategy for Greedy {
    fn name(&self) -> String {
        format!("greedy({})", self.directions)
    }

    fn next(&mut self, ctx: &MoveContext<'_>) -> Result<ManMove> {
        let angles: Vec<f64> = (0..self.directions).map(|i| TAU * i as f64 / self.directions as f64).collect();
        let mut best: Option<(f64, Point)> = None;
        for c in candidate_moves(ctx.space, ctx.man, ctx.lion, ctx.d, &angles) {
            if !admissible(ctx, &c) {
                continue;
            }
            let dist = ctx.space.distance(&c, ctx.lion)?;
            if best.as_ref().map_or(true, |(b, _)| dist > *b) {
                best = Some((dist, c));
            }
        }
        let stay = ctx.space.distance(ctx.man, ctx.lion)?;
        Ok(match best {
            Some((d, p)) if d > stay => ManMove::To(p),
            Some(_) => ManMove::To(ctx.man.clone()),
            None => ManMove::Stay,
        })
    }
}

/// A uniformly random direction each step, from a seeded generator.
pub struct RandomWalk {
    rng: ChaCha8Rng,
    seed: u64,
}

pub fn man_random_strategy(seed: u64) -> RandomWalk {
    RandomWalk {
        rng: ChaCha8Rng::seed_from_u64(seed),
        seed,
    }
}

impl ManStrategy for RandomWalk {
    fn name(&self) -> String {
        format!("random(seed={})", self.seed)
    }

    fn next(&mut self, ctx: &MoveContext<'_>) -> Result<ManMove> {
        for _ in 0..32 {
            let theta = self.rng.gen::<f64>() * TAU;
            let mut cands = candidate_moves(ctx.space, ctx.man, ctx.lion, ctx.d, &[theta]);
            if let Space::Tree(_) = ctx.space {
                cands = candidate_moves(ctx.space, ctx.man, ctx.lion, ctx.d, &[]);
                if cands.is_empty() {
                    break;
                }
                let i = self.rng.gen_range(0..cands.len());
                cands = vec![cands.swap_remove(i)];
            }
            if let Some(p) = cands.into_iter().find(|p| admissible(ctx, p)) {
                return Ok(ManMove::To(p));
            }
        }
        Ok(ManMove::Stay)
    }
}

/// Replays a fixed list of positions `M₁, M₂, …`, then stays put.
pub struct Scripted {
    moves: Vec<Point>,
}

pub fn man_scripted_strategy(moves: Vec<Point>) -> Scripted {
    Scripted { moves }
}

impl ManStrategy for Scripted {
    fn name(&self) -> String {
        "scripted".into()
    }

    fn next(&mut self, ctx: &MoveContext<'_>) -> Result<ManMove> {
        Ok(ManMove::To(self.moves.get(ctx.step).cloned().unwrap_or_else(|| ctx.man.clone())))
    }
}

/// Serializable strategy choice, as named in configs and on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StrategySpec {
    Stationary,
    Greedy {
        #[serde(default = "default_directions")]
        directions: usize,
    },
    Random,
    /// Follows a directional curve; in an R-tree with a ray edge and no
    /// curve given, the ray itself from the lion's start.
    Directional,
}

fn default_directions() -> usize {
    16
}

impl StrategySpec {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, StrategySpec::Random)
    }

    /// Instantiates the strategy. `curve` is required for `directional`
    /// outside ray trees; `seed` for `random`.
    pub fn build(&self, space: &Space, lion_start: &Point, d: f64, curve: Option<Curve>, seed: Option<u64>) -> Result<Box<dyn ManStrategy>> {
        Ok(match self {
            StrategySpec::Stationary => Box::new(Stationary),
            StrategySpec::Greedy { directions } => Box::new(man_greedy_strategy(*directions)?),
            StrategySpec::Random => {
                let seed = seed.ok_or_else(|| invalid("the random strategy needs a seed"))?;
                Box::new(man_random_strategy(seed))
            }
            StrategySpec::Directional => {
                let curve = match curve {
                    Some(c) => c,
                    None => ray_curve(space, lion_start)?,
                };
                Box::new(man_directional_strategy(curve, d)?)
            }
        })
    }
}

/// Unit-speed geodesic ray in a tree with a ray edge: from `start` to the
/// ray's anchor, then out along the ray.
pub fn ray_curve(space: &Space, start: &Point) -> Result<Curve> {
    let tree = space
        .as_tree()
        .ok_or_else(|| Error::PreconditionViolated("directional strategy needs a curve outside ray trees".into()))?;
    let (edge, anchor) = match (tree.ray_edge(), tree.ray_anchor()) {
        (Some(e), Some(a)) => (e, a),
        _ => return Err(Error::PreconditionViolated("tree has no ray edge".into())),
    };
    space.validate(start)?;
    let on_ray = matches!(tree.canonical(match start {
        Point::Tree(tp) => tp,
        _ => unreachable!("validated"),
    }), TreePoint::Edge { edge: e, .. } if e == edge);
    let mut pts = vec![start.clone()];
    if !on_ray {
        pts.push(Point::vertex(anchor));
    }
    let last = pts.last().expect("nonempty").clone();
    let offset = match last {
        Point::Tree(TreePoint::Edge { offset, .. }) => offset,
        _ => 0.0,
    };
    pts.push(Point::on_edge(edge, offset + 1.0));
    Ok(Curve::from_polyline(space.clone(), pts)?.with_tail(crate::curves::Tail::Geodesic))
}
