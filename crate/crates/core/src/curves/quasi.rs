use serde::{Deserialize, Serialize};

use super::scan::{self, Bound, PairWitness};
use super::Curve;
use crate::error::{invalid, Result};

/// Outcome of a grid check of `(1/λ)|s−t| − ε ≤ d(γ(s),γ(t)) ≤ λ|s−t| + ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGReport {
    pub lambda: f64,
    pub epsilon: f64,
    /// Locality bound: only pairs with `|s−t| ≤ k` were tested.
    pub k: Option<f64>,
    pub grid: usize,
    pub pairs_tested: usize,
    pub pass: bool,
    /// Smallest `d(γ(s),γ(t)) / |s−t|` over tested pairs.
    pub worst_lower_ratio: f64,
    /// Pair with the smallest lower-bound slack `d − (|s−t|/λ − ε)`.
    pub worst_lower: Option<PairWitness>,
    /// Largest `d − λ|s−t| − ε`.
    pub worst_upper_excess: f64,
    pub worst_upper: Option<PairWitness>,
    /// Lexicographically first pair violating either bound.
    pub first_violation: Option<(Bound, PairWitness)>,
}

impl QGReport {
    /// The pair to show for a failure: the first violation if any.
    pub fn witness(&self) -> Option<&PairWitness> {
        self.first_violation.as_ref().map(|(_, w)| w)
    }
}

pub fn check_quasi_geodesic(curve: &Curve, lambda: f64, epsilon: f64, grid: usize, k: Option<f64>) -> Result<QGReport> {
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(invalid(format!("lambda must be at least 1, got {lambda}")));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    if let Some(k) = k {
        if !(k > 0.0) {
            return Err(invalid(format!("locality bound must be positive, got {k}")));
        }
    }
    let ts = scan::grid_params(curve, grid)?;
    let tol = curve.space().tolerance();
    let s = scan::scan(curve, &ts, k, tol, |g| g / lambda - epsilon, |g| lambda * g + epsilon)?;
    Ok(QGReport {
        lambda,
        epsilon,
        k,
        grid,
        pairs_tested: s.pairs,
        pass: s.first_violation.is_none(),
        worst_lower_ratio: if s.pairs == 0 { 1.0 } else { s.min_ratio },
        worst_lower: s.lower,
        worst_upper_excess: s.upper.map_or(0.0, |w| -w.slack),
        worst_upper: s.upper,
        first_violation: s.first_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{Point, Space};

    #[test]
    fn geodesic_passes_every_lambda() {
        let s = Space::euclidean(2).unwrap();
        let c = Curve::from_polyline(s, vec![Point::euclidean([0.0, 0.0]), Point::euclidean([3.0, 4.0])]).unwrap();
        for lambda in [1.0, 1.5, 10.0] {
            let r = check_quasi_geodesic(&c, lambda, 0.0, 20, None).unwrap();
            assert!(r.pass);
        }
        let r = check_quasi_geodesic(&c, 1.0, 0.0, 20, None).unwrap();
        assert!((r.worst_lower_ratio - 1.0).abs() < 1e-12);
        assert_eq!(r.pairs_tested, 20 * 19 / 2);
    }

    #[test]
    fn right_angle_corner_fails_lambda_one() {
        let s = Space::euclidean(2).unwrap();
        let c = Curve::from_polyline(
            s,
            vec![Point::euclidean([0.0, 0.0]), Point::euclidean([1.0, 0.0]), Point::euclidean([1.0, 1.0])],
        )
        .unwrap();
        let r = check_quasi_geodesic(&c, 1.0, 0.0, 3, None).unwrap();
        assert!(!r.pass);
        let (bound, w) = r.first_violation.unwrap();
        assert_eq!(bound, Bound::Lower);
        assert_eq!((w.s, w.t), (0.0, 2.0));
        assert!(check_quasi_geodesic(&c, 2f64.sqrt(), 0.0, 50, None).unwrap().pass);
        // locally the corner is invisible at scale below the first piece
        let local = check_quasi_geodesic(&c, 1.0, 0.0, 3, Some(1.0)).unwrap();
        assert!(local.pass);
    }

    #[test]
    fn rejects_bad_constants() {
        let s = Space::euclidean(1).unwrap();
        let c = Curve::from_polyline(s, vec![Point::euclidean([0.0]), Point::euclidean([1.0])]).unwrap();
        assert!(check_quasi_geodesic(&c, 0.5, 0.0, 10, None).is_err());
        assert!(check_quasi_geodesic(&c, 1.0, -1.0, 10, None).is_err());
        assert!(check_quasi_geodesic(&c, 1.0, 0.0, 1, None).is_err());
    }
}
