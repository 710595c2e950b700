use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scan::{self, Bound};
use super::Curve;
use crate::error::{invalid, Result};
use crate::space::{Point, Space};

/// What a directional witness refers to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// Curve parameters `(s, t)`.
    Pair { s: f64, t: f64 },
    /// Indices `n₁ < … < n_l` of a sequence.
    Subsequence(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalWitness {
    pub bound: Bound,
    pub at: WitnessKind,
    pub distance: f64,
    /// Negative means the inequality is violated.
    pub slack: f64,
}

/// Outcome of a directionality check with constant `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalityReport {
    pub b: f64,
    pub pass: bool,
    /// Number of pairs or subsequences tested.
    pub tested: usize,
    pub worst_slack: f64,
    pub worst: Option<DirectionalWitness>,
    pub first_violation: Option<DirectionalWitness>,
    /// For sequences, `d(x₀, x_last)`: the growth trend, reported only.
    pub final_distance: Option<f64>,
}

/// Grid check of `|s−t| − b ≤ d(γ(s),γ(t)) ≤ |s−t|`.
pub fn check_directional_curve(curve: &Curve, b: f64, grid: usize) -> Result<DirectionalityReport> {
    if !(b.is_finite() && b >= 0.0) {
        return Err(invalid(format!("b must be nonnegative, got {b}")));
    }
    let ts = scan::grid_params(curve, grid)?;
    let tol = curve.space().tolerance();
    let s = scan::scan(curve, &ts, None, tol, |g| g - b, |g| g)?;
    let to_witness = |bound: Bound, w: scan::PairWitness| DirectionalWitness {
        bound,
        at: WitnessKind::Pair { s: w.s, t: w.t },
        distance: w.distance,
        slack: w.slack,
    };
    let worst = match (s.lower, s.upper) {
        (Some(l), Some(u)) if u.slack < l.slack => Some(to_witness(Bound::Upper, u)),
        (Some(l), _) => Some(to_witness(Bound::Lower, l)),
        _ => None,
    };
    Ok(DirectionalityReport {
        b,
        pass: s.first_violation.is_none(),
        tested: s.pairs,
        worst_slack: worst.as_ref().map_or(b, |w| w.slack),
        worst,
        first_violation: s.first_violation.map(|(bound, w)| to_witness(bound, w)),
        final_distance: None,
    })
}

/// Longest random subsequence drawn by the budgeted search.
const MAX_RANDOM_LENGTH: usize = 12;

/// Checks `d(x_{n₁}, x_{n_l}) ≥ Σ d(x_{nᵢ}, x_{nᵢ₊₁}) − b` on every
/// consecutive window `n, n+1, …, m` and on `budget` random subsequences
/// drawn from `seed`.
pub fn check_directional_sequence(space: &Space, points: &[Point], b: f64, budget: usize, seed: u64) -> Result<DirectionalityReport> {
    if points.len() < 2 {
        return Err(invalid("a directional sequence needs at least 2 points"));
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(invalid(format!("b must be nonnegative, got {b}")));
    }
    for p in points {
        space.validate(p)?;
    }
    let n = points.len();
    let tol = space.tolerance();
    let mut prefix = Vec::with_capacity(n);
    prefix.push(0.0);
    for w in points.windows(2) {
        prefix.push(prefix.last().unwrap() + space.distance_unchecked(&w[0], &w[1]));
    }
    let make = |indices: Vec<usize>, d: f64, sum: f64| DirectionalWitness {
        bound: Bound::Lower,
        at: WitnessKind::Subsequence(indices),
        distance: d,
        slack: d - sum + b,
    };
    let violated = |w: &DirectionalWitness, sum: f64| w.slack < -tol * sum.max(1.0);

    // (worst slack (i, j), first violation (i, j)) per row.
    let rows: Vec<(Option<(f64, usize, usize)>, Option<(usize, usize)>)> = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut worst: Option<(f64, usize, usize)> = None;
            let mut first = None;
            for j in i + 1..n {
                let d = space.distance_unchecked(&points[i], &points[j]);
                let sum = prefix[j] - prefix[i];
                let slack = d - sum + b;
                if worst.map_or(true, |(w, _, _)| slack < w) {
                    worst = Some((slack, i, j));
                }
                if first.is_none() && slack < -tol * sum.max(1.0) {
                    first = Some((i, j));
                }
            }
            (worst, first)
        })
        .collect();
    let window = |i: usize, j: usize| {
        let d = space.distance_unchecked(&points[i], &points[j]);
        make((i..=j).collect(), d, prefix[j] - prefix[i])
    };
    let mut worst: Option<(f64, usize, usize)> = None;
    let mut first_violation = None;
    for (w, f) in rows {
        if let Some(w) = w {
            if worst.map_or(true, |o| w.0 < o.0) {
                worst = Some(w);
            }
        }
        if first_violation.is_none() {
            first_violation = f.map(|(i, j)| window(i, j));
        }
    }
    let mut worst = worst.map(|(_, i, j)| window(i, j));
    let mut tested = n * (n - 1) / 2;

    if n >= 3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget {
            let len = rng.gen_range(3..=n.min(MAX_RANDOM_LENGTH));
            let mut idx = sample(&mut rng, n, len).into_vec();
            idx.sort_unstable();
            let sum: f64 = idx.windows(2).map(|w| space.distance_unchecked(&points[w[0]], &points[w[1]])).sum();
            let d = space.distance_unchecked(&points[idx[0]], &points[*idx.last().unwrap()]);
            let w = make(idx, d, sum);
            if first_violation.is_none() && violated(&w, sum) {
                first_violation = Some(w.clone());
            }
            if worst.as_ref().map_or(true, |o| w.slack < o.slack) {
                worst = Some(w);
            }
            tested += 1;
        }
    }
    Ok(DirectionalityReport {
        b,
        pass: first_violation.is_none(),
        tested,
        worst_slack: worst.as_ref().map_or(b, |w| w.slack),
        worst,
        first_violation,
        final_distance: Some(space.distance_unchecked(&points[0], &points[n - 1])),
    })
}
