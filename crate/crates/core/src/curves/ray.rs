use serde::{Deserialize, Serialize};

use super::Curve;
use crate::error::{invalid, Error, Result};
use crate::space::{Point, Space};

/// Residual below which the approximations `x_k^n` count as converged.
pub const CONVERGENCE: f64 = 1e-6;
/// Iteration cap on `n` (guards `αⁿ` against overflow).
pub const MAX_ITERATIONS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopCause {
    Converged,
    IterationCap,
    /// The curve or sequence ran out before convergence.
    DataExhausted,
}

/// The limit point `x*_k` with its Cauchy history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayPoint {
    pub k: u32,
    pub point: Point,
    pub distance_from_base: f64,
    /// Indices `n` at which `x_k^n` was computed.
    pub indices: Vec<usize>,
    /// `d(x_k^{n_i}, x_k^{n_{i+1}})` for consecutive entries of `indices`.
    pub residuals: Vec<f64>,
    /// Theoretical bound `4kδ*/(βαⁿ)` for each residual (quasi-geodesic input only).
    pub bounds: Vec<f64>,
    pub stop: StopCause,
}

/// `d(x*_k, p)` where `p` is the point of `[x₀, x*_l]` at distance `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestingResidual {
    pub k: u32,
    pub l: u32,
    pub residual: f64,
}

/// Comparison angle at `x₀` between `x_m` and `x_n` against the bound
/// `sin²(ᾱ/2) ≤ (b/2d_m)(b/(2d_n) + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleCheck {
    pub m: usize,
    pub n: usize,
    pub d_m: f64,
    pub d_n: f64,
    pub angle: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl AngleCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayApprox {
    pub base: Point,
    pub points: Vec<RayPoint>,
    pub nesting: Vec<NestingResidual>,
    pub angle_checks: Vec<AngleCheck>,
    /// `β = 1/λ + λ + α(1/λ − λ)` for quasi-geodesic input.
    pub beta: Option<f64>,
}

impl RayApprox {
    pub fn point(&self, k: u32) -> Option<&Point> {
        self.points.iter().find(|p| p.k == k).map(|p| &p.point)
    }

    /// Largest `|d(x₀, x*_k) − k|`.
    pub fn max_distance_error(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.distance_from_base - p.k as f64).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_nesting_residual(&self) -> f64 {
        self.nesting.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.points
            .iter()
            .flat_map(|p| p.residuals.iter().copied())
            .fold(0.0, f64::max)
    }
}

/// `β = 1/λ + λ + α(1/λ − λ)`.
pub fn extraction_beta(lambda: f64, alpha: f64) -> f64 {
    1.0 / lambda + lambda + alpha * (1.0 / lambda - lambda)
}

struct Approximant {
    index: usize,
    point: Point,
}

fn limit_point(space: &Space, base: &Point, k: u32, seq: &[(usize, Point, f64)], capped: bool, bound: impl Fn(usize) -> f64) -> Result<RayPoint> {
    let kf = k as f64;
    let mut approx: Vec<Approximant> = Vec::new();
    let mut residuals = Vec::new();
    let mut bounds = Vec::new();
    let mut stop = if capped { StopCause::IterationCap } else { StopCause::DataExhausted };
    for (index, x, d) in seq {
        if *d < kf {
            continue;
        }
        let p = space.point_toward(base, x, kf)?;
        if let Some(prev) = approx.last() {
            let r = space.distance(&prev.point, &p)?;
            residuals.push(r);
            bounds.push(bound(prev.index));
            approx.push(Approximant { index: *index, point: p });
            if r < CONVERGENCE {
                stop = StopCause::Converged;
                break;
            }
        } else {
            approx.push(Approximant { index: *index, point: p });
        }
    }
    let last = approx.last().ok_or(Error::InsufficientData { k })?;
    Ok(RayPoint {
        k,
        point: last.point.clone(),
        distance_from_base: space.distance(base, &last.point)?,
        indices: approx.iter().map(|a| a.index).collect(),
        residuals,
        bounds,
        stop,
    })
}

fn nesting(space: &Space, base: &Point, points: &[RayPoint]) -> Result<Vec<NestingResidual>> {
    let mut out = Vec::new();
    let Some(far) = points.last() else { return Ok(out) };
    for (i, p) in points.iter().enumerate() {
        let mut partners = vec![];
        if let Some(next) = points.get(i + 1) {
            partners.push(next);
        }
        if far.k > p.k + 1 {
            partners.push(far);
        }
        for q in partners {
            let on = space.point_toward(base, &q.point, p.k as f64)?;
            out.push(NestingResidual {
                k: p.k,
                l: q.k,
                residual: space.distance(&p.point, &on)?,
            });
        }
    }
    Ok(out)
}

fn check_k_max(k_max: u32) -> Result<()> {
    if k_max == 0 {
        return Err(invalid("k_max must be positive"));
    }
    Ok(())
}

/// Geodesic ray approximation from a `λ`-quasi-geodesic ray in a Gromov
/// hyperbolic space: `x_n = γ(αⁿ)`, and `x*_k` is the limit of the points at
/// distance `k` from `x₀ = γ(0)` on `[x₀, x_n]`.
pub fn extract_ray_from_quasi_geodesic(curve: &Curve, lambda: f64, alpha: f64, k_max: u32, delta_star: f64) -> Result<RayApprox> {
    let space = curve.space();
    if !space.kind().is_gromov_hyperbolic() {
        return Err(Error::UnsupportedSpace(space.kind().name()));
    }
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(invalid(format!("lambda must be at least 1, got {lambda}")));
    }
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(invalid(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(delta_star.is_finite() && delta_star >= 0.0) {
        return Err(invalid("delta* must be nonnegative"));
    }
    check_k_max(k_max)?;
    let beta = extraction_beta(lambda, alpha);
    if !(beta > 0.0) {
        return Err(Error::InvalidAlpha { beta });
    }
    let t0 = curve.start();
    let base = curve.eval(t0)?;
    let mut seq = Vec::new();
    let mut capped = true;
    for n in 1..=MAX_ITERATIONS {
        let t = t0 + alpha.powi(n as i32);
        if t > curve.reach() {
            capped = false;
            break;
        }
        let x = curve.eval(t)?;
        let d = space.distance(&base, &x)?;
        seq.push((n as usize, x, d));
    }
    let bound = |n: usize| 4.0 * delta_star / (beta * alpha.powi(n as i32));
    let points = (1..=k_max)
        .map(|k| limit_point(space, &base, k, &seq, capped, |n| k as f64 * bound(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RayApprox {
        nesting: nesting(space, &base, &points)?,
        base,
        points,
        angle_checks: Vec::new(),
        beta: Some(beta),
    })
}

/// Indices `1, 2, 4, 8, …` below `len`, plus `len − 1`.
fn doubling_schedule(len: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 1;
    while i < len {
        out.push(i);
        i *= 2;
    }
    if len >= 2 && out.last() != Some(&(len - 1)) {
        out.push(len - 1);
    }
    out
}

/// Geodesic ray approximation from a directional sequence with constant `b`
/// in a CAT(0) space. `x_k^n` is taken along a doubling schedule of `n`.
pub fn extract_ray_from_directional_sequence(space: &Space, points: &[Point], b: f64, k_max: u32) -> Result<RayApprox> {
    if points.len() < 2 {
        return Err(invalid("a directional sequence needs at least 2 points"));
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(invalid(format!("b must be nonnegative, got {b}")));
    }
    check_k_max(k_max)?;
    let base = points[0].clone();
    let schedule = doubling_schedule(points.len());
    let seq = schedule
        .iter()
        .map(|&n| Ok((n, points[n].clone(), space.distance(&base, &points[n])?)))
        .collect::<Result<Vec<_>>>()?;
    let ray = (1..=k_max)
        .map(|k| limit_point(space, &base, k, &seq, false, |_| f64::NAN))
        .collect::<Result<Vec<_>>>()?;
    let mut ray = ray;
    for p in &mut ray {
        p.bounds.clear();
    }

    let mut angle_checks = Vec::new();
    for (i, (m, xm, dm)) in seq.iter().enumerate() {
        for (n, xn, dn) in &seq[i + 1..] {
            if *dm == 0.0 || *dn == 0.0 {
                continue;
            }
            let dmn = space.distance(xm, xn)?;
            let angle = crate::hyperbolicity::angle_from_sides(*dm, *dn, dmn);
            angle_checks.push(AngleCheck {
                m: *m,
                n: *n,
                d_m: *dm,
                d_n: *dn,
                angle,
                lhs: (angle / 2.0).sin().powi(2),
                rhs: (b / (2.0 * dm)) * (b / (2.0 * dn) + 1.0),
            });
        }
    }
    Ok(RayApprox {
        nesting: nesting(space, &base, &ray)?,
        base,
        points: ray,
        angle_checks,
        beta: None,
    })
}
