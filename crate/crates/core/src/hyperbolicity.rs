//! Gromov products, slimness and δ estimation, comparison triangles and
//! angles, and the CAT(0) comparison defect.

use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{check_quasi_geodesic, zigzag_amplitude_for, zigzag_polyline, Curve};
use crate::error::{invalid, Error, Result};
use crate::space::tree::{to_f64, RTree};
use crate::space::{Point, PointSampler, Segment, Space, TreePoint};

fn tree_points<'a>(space: &'a Space, pts: &[&'a Point]) -> Option<(&'a RTree, Vec<&'a TreePoint>)> {
    let tree = space.as_tree()?;
    let tps = pts
        .iter()
        .map(|p| match p {
            Point::Tree(tp) => Some(tp),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some((tree, tps))
}

fn exact_gromov_product(tree: &RTree, x: &TreePoint, y: &TreePoint, z: &TreePoint) -> BigRational {
    let two = BigRational::from_integer(2.into());
    (tree.exact_distance(x, y) + tree.exact_distance(x, z) - tree.exact_distance(y, z)) / two
}

/// `(y|z)_x = ½(d(x,y) + d(x,z) − d(y,z))`.
pub fn gromov_product(space: &Space, x: &Point, y: &Point, z: &Point) -> Result<f64> {
    for p in [x, y, z] {
        space.validate(p)?;
    }
    if let Some((tree, t)) = tree_points(space, &[x, y, z]) {
        return Ok(to_f64(&exact_gromov_product(tree, t[0], t[1], t[2])));
    }
    let d = |a, b| space.distance_unchecked(a, b);
    Ok((0.5 * (d(x, y) + d(x, z) - d(y, z))).max(0.0))
}

/// Planar angle opposite side `c` in a triangle with sides `a`, `b`, `c`
/// (law of cosines, clamped to `[0, π]`).
pub fn angle_from_sides(a: f64, b: f64, c: f64) -> f64 {
    ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0).acos()
}

/// Angle at the apex of the comparison triangle for `(apex, y, z)`.
pub fn comparison_angle(space: &Space, apex: &Point, y: &Point, z: &Point) -> Result<f64> {
    let a = space.distance(apex, y)?;
    let b = space.distance(apex, z)?;
    if a == 0.0 || b == 0.0 {
        return Err(Error::Degenerate("comparison angle needs both sides positive".into()));
    }
    Ok(angle_from_sides(a, b, space.distance(y, z)?))
}

/// Alexandrov angle at `apex` between `[apex, y]` and `[apex, z]`.
pub fn alexandrov_angle(space: &Space, apex: &Point, y: &Point, z: &Point) -> Result<f64> {
    space.validate(apex)?;
    space.validate(y)?;
    space.validate(z)?;
    if apex == y || apex == z || space.distance_unchecked(apex, y) == 0.0 || space.distance_unchecked(apex, z) == 0.0 {
        return Err(Error::Degenerate("angle at a point coinciding with an endpoint".into()));
    }
    Ok(space.angle_at(apex, y, z))
}

/// Angle as the limit of comparison angles at scales `h, h/2, h/4, …`,
/// stopping once successive values differ by less than `1e-6`.
pub fn alexandrov_angle_by_halving(space: &Space, apex: &Point, y: &Point, z: &Point, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(invalid("initial scale must be positive"));
    }
    let (dy, dz) = (space.distance(apex, y)?, space.distance(apex, z)?);
    if dy == 0.0 || dz == 0.0 {
        return Err(Error::Degenerate("angle at a point coinciding with an endpoint".into()));
    }
    let mut h = h.min(dy).min(dz);
    let mut prev = None;
    for _ in 0..60 {
        let a = comparison_angle(space, apex, &space.point_toward(apex, y, h)?, &space.point_toward(apex, z, h)?)?;
        if prev.is_some_and(|p: f64| (p - a).abs() < 1e-6) {
            return Ok(a);
        }
        prev = Some(a);
        h /= 2.0;
    }
    Ok(prev.expect("at least one scale"))
}

/// Planar triangle with prescribed side lengths, planted with the first
/// vertex at the origin and the second on the positive x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTriangle {
    /// `d(x,y)`, `d(y,z)`, `d(z,x)`.
    pub sides: [f64; 3],
    pub vertices: [[f64; 2]; 3],
}

impl ComparisonTriangle {
    pub fn from_sides(xy: f64, yz: f64, zx: f64) -> Result<Self> {
        let sides = [xy, yz, zx];
        if sides.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(invalid("side lengths must be finite and nonnegative"));
        }
        let slack = 1e-9 * (xy + yz + zx).max(1.0);
        if xy > yz + zx + slack || yz > xy + zx + slack || zx > xy + yz + slack {
            return Err(invalid("side lengths violate the triangle inequality"));
        }
        let z = if xy == 0.0 {
            [zx, 0.0]
        } else {
            let zx_coord = ((xy * xy + zx * zx - yz * yz) / (2.0 * xy)).clamp(-zx, zx);
            [zx_coord, (zx * zx - zx_coord * zx_coord).max(0.0).sqrt()]
        };
        Ok(ComparisonTriangle {
            sides,
            vertices: [[0.0, 0.0], [xy, 0.0], z],
        })
    }

    pub fn of(space: &Space, x: &Point, y: &Point, z: &Point) -> Result<Self> {
        Self::from_sides(space.distance(x, y)?, space.distance(y, z)?, space.distance(z, x)?)
    }

    /// Comparison point at fraction `t` along side `i` (0: x→y, 1: y→z, 2: z→x).
    pub fn point_on_side(&self, i: usize, t: f64) -> [f64; 2] {
        let a = self.vertices[i % 3];
        let b = self.vertices[(i + 1) % 3];
        [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
    }

    /// Interior angle at vertex `i`.
    pub fn angle(&self, i: usize) -> f64 {
        let [xy, yz, zx] = self.sides;
        match i % 3 {
            0 => angle_from_sides(xy, zx, yz),
            1 => angle_from_sides(xy, yz, zx),
            _ => angle_from_sides(yz, zx, xy),
        }
    }
}

/// A sampled side point farthest from the other two sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlimWitness {
    pub side: usize,
    /// Arc length from the start of the side.
    pub along: f64,
    pub point: Point,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlimnessReport {
    pub estimate: f64,
    pub witness: Option<SlimWitness>,
    pub grid: usize,
}

/// `grid` points spaced evenly by arc length along `path`, with their arc
/// length positions.
fn sample_polyline(space: &Space, path: &[Point], grid: usize) -> Result<Vec<(f64, Point)>> {
    let lens: Vec<f64> = path.windows(2).map(|w| space.distance_unchecked(&w[0], &w[1])).collect();
    let total: f64 = lens.iter().sum();
    let mut out = Vec::with_capacity(grid);
    let (mut piece, mut before) = (0usize, 0.0);
    for j in 0..grid {
        let s = if j + 1 == grid { total } else { total * j as f64 / (grid - 1) as f64 };
        while piece + 1 < lens.len() && s > before + lens[piece] {
            before += lens[piece];
            piece += 1;
        }
        let p = if lens.is_empty() {
            path[0].clone()
        } else if j + 1 == grid {
            path[path.len() - 1].clone()
        } else {
            space.point_toward(&path[piece], &path[piece + 1], (s - before).max(0.0))?
        };
        out.push((s, p));
    }
    Ok(out)
}

fn distance_to_polyline(space: &Space, p: &Point, path: &[Point]) -> Result<f64> {
    if path.len() == 1 {
        return space.distance(p, &path[0]);
    }
    let mut best = f64::INFINITY;
    for w in path.windows(2) {
        let (_, d) = space.project_to_segment(p, &Segment::new(w[0].clone(), w[1].clone()))?;
        best = best.min(d);
    }
    Ok(best)
}

/// Slimness of a triangle whose sides are polylines: the largest distance
/// from a sampled point of one side to the union of the other two.
pub fn slim_defect_of_paths(space: &Space, sides: [&[Point]; 3], grid: usize) -> Result<SlimnessReport> {
    if grid < 2 {
        return Err(invalid("grid must have at least 2 points"));
    }
    for side in sides {
        if side.is_empty() {
            return Err(invalid("a triangle side needs at least one point"));
        }
        for p in side {
            space.validate(p)?;
        }
    }
    let mut best: Option<SlimWitness> = None;
    for i in 0..3 {
        let others = [sides[(i + 1) % 3], sides[(i + 2) % 3]];
        for (along, p) in sample_polyline(space, sides[i], grid)? {
            let d = distance_to_polyline(space, &p, others[0])?.min(distance_to_polyline(space, &p, others[1])?);
            if best.as_ref().map_or(true, |b| d > b.distance) {
                best = Some(SlimWitness { side: i, along, point: p, distance: d });
            }
        }
    }
    Ok(SlimnessReport {
        estimate: best.as_ref().map_or(0.0, |b| b.distance.max(0.0)),
        witness: best,
        grid,
    })
}

/// Slimness of the geodesic triangle `x, y, z` sampled on `grid` points per side.
pub fn slim_defect(space: &Space, x: &Point, y: &Point, z: &Point, grid: usize) -> Result<SlimnessReport> {
    let (a, b, c) = ([x.clone(), y.clone()], [y.clone(), z.clone()], [z.clone(), x.clone()]);
    slim_defect_of_paths(space, [&a, &b, &c], grid)
}

/// Seeded random-triangle experiment parameters. Trial `i` draws its
/// vertices from stream `i` of `seed`, so results do not depend on
/// evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub seed: u64,
    pub scale: f64,
    pub trials: usize,
    /// Sample points per side.
    pub grid: usize,
}

impl TrialConfig {
    pub fn new(seed: u64, scale: f64, trials: usize) -> Self {
        TrialConfig { seed, scale, trials, grid: 64 }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be positive"));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(invalid("sampling scale must be positive"));
        }
        if self.grid < 2 {
            return Err(invalid("grid must have at least 2 points"));
        }
        Ok(())
    }

    fn triangle(&self, space: &Space, trial: usize) -> [Point; 3] {
        let mut s = PointSampler::for_stream(self.seed, self.scale, trial as u64);
        [s.sample(space), s.sample(space), s.sample(space)]
    }
}

/// Maximum over trials with its argmax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlimEstimate {
    pub value: f64,
    pub trial: usize,
    pub report: SlimnessReport,
}

fn max_over_trials(per_trial: Vec<Result<SlimnessReport>>) -> Result<SlimEstimate> {
    let mut best: Option<SlimEstimate> = None;
    for (trial, r) in per_trial.into_iter().enumerate() {
        let report = r?;
        if best.as_ref().map_or(true, |b| report.estimate > b.value) {
            best = Some(SlimEstimate { value: report.estimate, trial, report });
        }
    }
    Ok(best.expect("trials ≥ 1"))
}

/// Largest slimness over `trials` random geodesic triangles.
pub fn estimate_delta(space: &Space, cfg: &TrialConfig) -> Result<SlimEstimate> {
    cfg.validate()?;
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let [x, y, z] = cfg.triangle(space, i);
            slim_defect(space, &x, &y, &z, cfg.grid)
        })
        .collect();
    max_over_trials(per_trial)
}

/// Quasi-geodesic constants for which zigzag sides are generated. A side
/// built for level `Λ` is used for every `λ ≥ Λ`, which makes the estimate
/// monotone in `λ`.
pub const ZIGZAG_LEVELS: [f64; 8] = [1.0, 1.1, 1.25, std::f64::consts::SQRT_2, 1.5, 2.0, 3.0, 4.0];
/// Pieces per zigzag side.
pub const ZIGZAG_PIECES: usize = 8;
/// Fraction of the Euclidean critical amplitude actually used.
const ZIGZAG_MARGIN: f64 = 0.9;

fn zigzag_side(space: &Space, u: &Point, v: &Point, level: f64, grid: usize) -> Result<Option<Vec<Point>>> {
    if level == 1.0 {
        return Ok(Some(vec![u.clone(), v.clone()]));
    }
    let d = space.distance(u, v)?;
    if d == 0.0 {
        return Ok(None);
    }
    let h = ZIGZAG_MARGIN * zigzag_amplitude_for(level, d / ZIGZAG_PIECES as f64);
    let path = match zigzag_polyline(space, u, v, ZIGZAG_PIECES, h, 1.0) {
        Ok(p) => p,
        Err(Error::UnsupportedSpace(_)) | Err(Error::Degenerate(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let curve = Curve::from_polyline(space.clone(), path.clone())?;
    let ok = check_quasi_geodesic(&curve, level, 0.0, grid.max(2), None)?.pass;
    Ok(ok.then_some(path))
}

/// Largest slimness over random triangles whose sides are λ-quasi-geodesic
/// zigzags (geodesic sides when `λ = 1`). Each side is certified by
/// [`check_quasi_geodesic`] before use; spaces without perpendiculars only
/// contribute geodesic triangles.
pub fn estimate_quasi_slim_m(space: &Space, lambda: f64, cfg: &TrialConfig) -> Result<SlimEstimate> {
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(invalid(format!("lambda must be at least 1, got {lambda}")));
    }
    cfg.validate()?;
    let levels: Vec<f64> = ZIGZAG_LEVELS.iter().copied().filter(|&l| l <= lambda).collect();
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let v = cfg.triangle(space, i);
            let mut best: Option<SlimnessReport> = None;
            for &level in &levels {
                let mut sides = Vec::with_capacity(3);
                for j in 0..3 {
                    match zigzag_side(space, &v[j], &v[(j + 1) % 3], level, cfg.grid)? {
                        Some(p) => sides.push(p),
                        None => break,
                    }
                }
                if sides.len() < 3 {
                    continue;
                }
                let r = slim_defect_of_paths(space, [&sides[0], &sides[1], &sides[2]], cfg.grid)?;
                if best.as_ref().map_or(true, |b| r.estimate > b.estimate) {
                    best = Some(r);
                }
            }
            Ok(best.expect("the geodesic level is always admissible"))
        })
        .collect();
    max_over_trials(per_trial)
}

/// One triple's largest `d(y′, z′)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionWitness {
    pub triple: usize,
    pub gromov_product: f64,
    pub r: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GromovCriterionReport {
    pub delta_prime: f64,
    pub sup: f64,
    pub pass: bool,
    pub levels: usize,
    /// One entry per triple with an admissible level (`(y|z)_x > 0`).
    pub witnesses: Vec<CriterionWitness>,
}

impl GromovCriterionReport {
    pub fn worst(&self) -> Option<&CriterionWitness> {
        self.witnesses
            .iter()
            .fold(None, |b: Option<&CriterionWitness>, w| match b {
                Some(b) if b.distance >= w.distance => Some(b),
                _ => Some(w),
            })
    }
}

/// For each triple, the points `y′ ∈ [x,y]`, `z′ ∈ [x,z]` at distance
/// `r = j/levels · (y|z)_x` from `x`, `j = 1..=levels`, must satisfy
/// `d(y′,z′) ≤ δ′`. Trees are evaluated in exact arithmetic.
pub fn check_gromov_criterion(space: &Space, triples: &[(Point, Point, Point)], delta_prime: f64, levels: usize) -> Result<GromovCriterionReport> {
    if !(delta_prime.is_finite() && delta_prime >= 0.0) {
        return Err(invalid("delta' must be nonnegative"));
    }
    if levels == 0 {
        return Err(invalid("levels must be positive"));
    }
    let mut witnesses = Vec::new();
    for (i, (x, y, z)) in triples.iter().enumerate() {
        let mut best: Option<CriterionWitness> = None;
        let mut consider = |gp: f64, r: f64, d: f64| {
            if best.as_ref().map_or(true, |b| d > b.distance) {
                best = Some(CriterionWitness { triple: i, gromov_product: gp, r, distance: d });
            }
        };
        if let Some((tree, t)) = tree_points(space, &[x, y, z]) {
            for p in [x, y, z] {
                space.validate(p)?;
            }
            let gp = exact_gromov_product(tree, t[0], t[1], t[2]);
            if !gp.is_positive() {
                continue;
            }
            for j in 1..=levels {
                let r = &gp * BigRational::new(j.into(), levels.into());
                let yp = tree.walk_exact(t[0], t[1], &r);
                let zp = tree.walk_exact(t[0], t[2], &r);
                consider(to_f64(&gp), to_f64(&r), to_f64(&tree.exact_distance(&yp, &zp)));
            }
        } else {
            let gp = gromov_product(space, x, y, z)?;
            if gp <= 0.0 {
                continue;
            }
            for j in 1..=levels {
                let r = gp * j as f64 / levels as f64;
                let yp = space.point_toward(x, y, r)?;
                let zp = space.point_toward(x, z, r)?;
                consider(gp, r, space.distance_unchecked(&yp, &zp));
            }
        }
        witnesses.extend(best);
    }
    let sup = witnesses.iter().map(|w| w.distance).fold(0.0, f64::max);
    let pass = sup <= delta_prime + space.tolerance() * delta_prime.max(1.0);
    Ok(GromovCriterionReport { delta_prime, sup, pass, levels, witnesses })
}

/// Largest `d(p,q) − |p̄ − q̄|` over pairs of interior side points
/// (fractions `j/grid`) on different sides, against the planted comparison
/// triangle. Non-positive up to rounding in CAT(0) spaces.
pub fn cat_defect(space: &Space, x: &Point, y: &Point, z: &Point, grid: usize) -> Result<f64> {
    if grid < 2 {
        return Err(invalid("grid must be at least 2"));
    }
    let tri = ComparisonTriangle::of(space, x, y, z)?;
    let verts = [x, y, z];
    let mut samples: Vec<(usize, Point, [f64; 2])> = Vec::with_capacity(3 * (grid - 1));
    for i in 0..3 {
        for j in 1..grid {
            let t = j as f64 / grid as f64;
            let p = space.geodesic_point(verts[i], verts[(i + 1) % 3], t)?;
            samples.push((i, p, tri.point_on_side(i, t)));
        }
    }
    let mut worst = f64::NEG_INFINITY;
    for (a, (si, p, pb)) in samples.iter().enumerate() {
        for (sj, q, qb) in &samples[a + 1..] {
            if si == sj {
                continue;
            }
            let planar = ((pb[0] - qb[0]).powi(2) + (pb[1] - qb[1]).powi(2)).sqrt();
            worst = worst.max(space.distance_unchecked(p, q) - planar);
        }
    }
    Ok(if worst.is_finite() { worst } else { 0.0 })
}
