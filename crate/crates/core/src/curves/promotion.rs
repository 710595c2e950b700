use serde::{Deserialize, Serialize};

use super::quasi::{check_quasi_geodesic, QGReport};
use super::{scan, Curve};
use crate::error::{invalid, Error, Result};
use crate::space::Segment;

/// Global constants `(λ*, ε)` for a k-local λ-quasi-geodesic in a space whose
/// λ-quasi-geodesic triangles are M-slim:
/// `λ* = (1/λ − 4M/(k/2 + λM))⁻¹`, `ε = 2M`. Requires `k > 8λM`.
pub fn promote_constants(lambda: f64, m: f64, k: f64) -> Result<(f64, f64)> {
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(invalid(format!("lambda must be at least 1, got {lambda}")));
    }
    if !(m.is_finite() && m >= 0.0) {
        return Err(invalid(format!("M must be nonnegative, got {m}")));
    }
    if !k.is_finite() {
        return Err(invalid("k must be finite"));
    }
    if !(k > 8.0 * lambda * m) {
        return Err(Error::PreconditionViolated(format!(
            "k = {k} does not exceed 8λM = {}",
            8.0 * lambda * m
        )));
    }
    let lambda_star = 1.0 / (1.0 / lambda - 4.0 * m / (k / 2.0 + lambda * m));
    Ok((lambda_star, 2.0 * m))
}

/// Distance from sampled curve points to the segment joining the endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodCheck {
    pub radius: f64,
    pub max_distance: f64,
    /// Parameter of the farthest sampled point.
    pub witness_t: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromotionReport {
    pub lambda_star: f64,
    pub epsilon: f64,
    pub local: QGReport,
    pub global: QGReport,
    pub neighborhood: NeighborhoodCheck,
    pub pass: bool,
}

/// Checks that a k-local λ-quasi-geodesic is a global `(λ*, 2M)`
/// quasi-geodesic and stays within `2M` of the segment between its
/// endpoints. The local property itself is a precondition.
pub fn verify_promotion(curve: &Curve, lambda: f64, m: f64, k: f64, grid: usize) -> Result<PromotionReport> {
    let (lambda_star, epsilon) = promote_constants(lambda, m, k)?;
    let local = check_quasi_geodesic(curve, lambda, 0.0, grid, Some(k))?;
    if !local.pass {
        let at = local.witness().map(|w| format!(" at ({}, {})", w.s, w.t)).unwrap_or_default();
        return Err(Error::PreconditionViolated(format!(
            "curve is not a {k}-local {lambda}-quasi-geodesic{at}"
        )));
    }
    let global = check_quasi_geodesic(curve, lambda_star, epsilon, grid, None)?;

    let space = curve.space();
    let seg = Segment::new(curve.eval(curve.start())?, curve.eval(curve.end())?);
    let mut max_distance = 0.0;
    let mut witness_t = curve.start();
    for t in scan::grid_params(curve, grid)? {
        let (_, d) = space.project_to_segment(&curve.eval(t)?, &seg)?;
        if d > max_distance {
            max_distance = d;
            witness_t = t;
        }
    }
    let radius = 2.0 * m;
    let neighborhood = NeighborhoodCheck {
        radius,
        max_distance,
        witness_t,
        pass: max_distance <= radius + space.tolerance() * radius.max(1.0),
    };
    Ok(PromotionReport {
        lambda_star,
        epsilon,
        pass: global.pass && neighborhood.pass,
        local,
        global,
        neighborhood,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        assert_eq!(promote_constants(1.0, 0.0, 1.0).unwrap(), (1.0, 0.0));
        let r2 = 2f64.sqrt();
        let (ls, eps) = promote_constants(r2, 1.0, 12.0).unwrap();
        assert!((ls - 1.0 / (1.0 / r2 - 4.0 / (6.0 + r2))).abs() < 1e-12);
        assert!((ls - 5.966).abs() < 1e-3);
        assert_eq!(eps, 2.0);
        assert!(matches!(promote_constants(r2, 1.0, 11.0), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn lambda_star_decreases_to_lambda() {
        let mut prev = f64::INFINITY;
        for k in [20.0, 50.0, 100.0, 1e3, 1e4, 1e6] {
            let (ls, _) = promote_constants(1.5, 1.0, k).unwrap();
            assert!(ls >= 1.5 && ls <= prev);
            prev = ls;
        }
        assert!(prev - 1.5 < 1e-4);
    }
}
