//! Shared pair scanner for the two-sided curve inequalities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Curve;
use crate::error::{invalid, Result};
use crate::space::Point;

/// Which side of a two-sided inequality a witness concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Lower,
    Upper,
}

/// A parameter pair with the distance it realizes and its slack against the
/// bound under test (negative means violated).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub s: f64,
    pub t: f64,
    pub distance: f64,
    pub slack: f64,
}

/// Evaluation parameters for a grid check: `grid` uniform parameters over the
/// sampled range merged with the sample parameters themselves.
pub(crate) fn grid_params(curve: &Curve, grid: usize) -> Result<Vec<f64>> {
    if grid < 2 {
        return Err(invalid("grid must have at least 2 points"));
    }
    let (a, b) = (curve.start(), curve.end());
    let mut ts: Vec<f64> = curve.params().to_vec();
    for i in 0..grid {
        let t = if i + 1 == grid { b } else { a + (b - a) * i as f64 / (grid - 1) as f64 };
        ts.push(t);
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    Ok(ts)
}

pub(crate) struct Scan {
    pub pairs: usize,
    pub min_ratio: f64,
    pub lower: Option<PairWitness>,
    pub upper: Option<PairWitness>,
    pub first_violation: Option<(Bound, PairWitness)>,
}

/// Checks `lower(gap) ≤ d(γ(s), γ(t)) ≤ upper(gap)` on all pairs of `ts`
/// with `gap ≤ k`. Worst witnesses are the smallest slacks; ties and the
/// first violation go to the lexicographically smallest `(s, t)`.
pub(crate) fn scan<L, U>(curve: &Curve, ts: &[f64], k: Option<f64>, tol: f64, lower: L, upper: U) -> Result<Scan>
where
    L: Fn(f64) -> f64 + Sync,
    U: Fn(f64) -> f64 + Sync,
{
    let points: Vec<Point> = ts.iter().map(|&t| curve.eval(t)).collect::<Result<_>>()?;
    let space = curve.space();
    let rows: Vec<Scan> = (0..ts.len())
        .into_par_iter()
        .map(|i| {
            let mut row = Scan {
                pairs: 0,
                min_ratio: f64::INFINITY,
                lower: None,
                upper: None,
                first_violation: None,
            };
            for j in i + 1..ts.len() {
                let gap = ts[j] - ts[i];
                if k.is_some_and(|k| gap > k) {
                    break;
                }
                row.pairs += 1;
                let d = space.distance_unchecked(&points[i], &points[j]);
                row.min_ratio = row.min_ratio.min(d / gap);
                let (lo, hi) = (lower(gap), upper(gap));
                let scale = tol * hi.abs().max(1.0);
                let wl = PairWitness { s: ts[i], t: ts[j], distance: d, slack: d - lo };
                let wu = PairWitness { s: ts[i], t: ts[j], distance: d, slack: hi - d };
                if row.lower.map_or(true, |w| wl.slack < w.slack) {
                    row.lower = Some(wl);
                }
                if row.upper.map_or(true, |w| wu.slack < w.slack) {
                    row.upper = Some(wu);
                }
                if row.first_violation.is_none() {
                    if wl.slack < -scale {
                        row.first_violation = Some((Bound::Lower, wl));
                    } else if wu.slack < -scale {
                        row.first_violation = Some((Bound::Upper, wu));
                    }
                }
            }
            row
        })
        .collect();
    let mut out = Scan {
        pairs: 0,
        min_ratio: f64::INFINITY,
        lower: None,
        upper: None,
        first_violation: None,
    };
    for row in rows {
        out.pairs += row.pairs;
        out.min_ratio = out.min_ratio.min(row.min_ratio);
        if let Some(w) = row.lower {
            if out.lower.map_or(true, |o| w.slack < o.slack) {
                out.lower = Some(w);
            }
        }
        if let Some(w) = row.upper {
            if out.upper.map_or(true, |o| w.slack < o.slack) {
                out.upper = Some(w);
            }
        }
        if out.first_violation.is_none() {
            out.first_violation = row.first_violation;
        }
    }
    Ok(out)
}
