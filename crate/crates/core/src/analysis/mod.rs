//! Post-hoc analysis of game transcripts.

mod equivalence;

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curves::{check_quasi_geodesic, Curve, QGReport};
use crate::error::{invalid, Error, Result};
use crate::game::{StopReason, Transcript};
use crate::hyperbolicity::alexandrov_angle;
use crate::space::tree::{exact, to_f64};
use crate::space::{Point, Space, TreePoint};

pub use equivalence::{equivalence_report, geodesically_bounded, EquivalenceConfig, EquivalenceReport, Hypotheses, RunSummary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaEntry {
    pub n: usize,
    /// `β_n = ∠_{L_n}(L_{n−1}, M_n)`; `None` where undefined.
    pub beta: Option<f64>,
    /// `α_n = ∠_{L_n}(M_{n−1}, M_n)`; `None` where undefined.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaSequence {
    pub entries: Vec<BetaEntry>,
    /// Minimum and mean of the defined `β_n` over the last 20% of entries.
    pub tail_min: Option<f64>,
    pub tail_mean: Option<f64>,
}

impl BetaSequence {
    pub fn betas(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().filter_map(|e| e.beta.map(|b| (e.n, b)))
    }

    /// CSV with columns `n,beta,alpha` (empty cells where undefined).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,beta,alpha\n");
        let cell = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{}", e.n, cell(e.beta), cell(e.alpha));
        }
        out
    }
}

fn angle_or_none(space: &Space, apex: &Point, y: &Point, z: &Point, tol: f64) -> Option<f64> {
    for p in [y, z] {
        if space.distance(apex, p).ok()? <= tol {
            return None;
        }
    }
    alexandrov_angle(space, apex, y, z).ok()
}

/// Lion angles `β_n` and companions `α_n` for `n = 1, …` up to the last
/// recorded man position. An angle is undefined when one of its points lies
/// within the capture tolerance of the apex (the lion has all but reached
/// the man); such steps are kept as gaps.
pub fn beta_angles(space: &Space, transcript: &Transcript) -> Result<BetaSequence> {
    transcript.validate(space)?;
    if transcript.steps.len() < 2 {
        return Err(invalid("beta angles need at least 2 steps"));
    }
    let s = &transcript.steps;
    let tol = transcript.config.tol;
    let entries: Vec<BetaEntry> = (1..s.len())
        .map(|n| BetaEntry {
            n,
            beta: angle_or_none(space, &s[n].lion, &s[n - 1].lion, &s[n].man, tol),
            alpha: angle_or_none(space, &s[n].lion, &s[n - 1].man, &s[n].man, tol),
        })
        .collect();
    let tail_len = (entries.len() / 5).max(1);
    let tail: Vec<f64> = entries[entries.len() - tail_len..].iter().filter_map(|e| e.beta).collect();
    Ok(BetaSequence {
        tail_min: tail.iter().copied().reduce(f64::min),
        tail_mean: (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64),
        entries,
    })
}

/// Angle threshold `π − π/(4⌈k/D⌉)`.
pub fn beta_threshold(k: f64, d: f64) -> f64 {
    PI - PI / (4.0 * (k / d).ceil())
}

/// Smallest `n_k ≥ 1` such that every defined `β_n` with `n ≥ n_k` meets the
/// threshold, and the lion's path from `L_{n_k}` on as a curve with
/// `γ(nD) = L_{n_k+n}`. Transcripts ending in capture are rejected.
pub fn curve_from_transcript(space: &Space, transcript: &Transcript, k: f64, d: f64) -> Result<(usize, Curve)> {
    if !(k > 0.0 && d > 0.0) {
        return Err(invalid("k and D must be positive"));
    }
    if let StopReason::PhysicalCapture { step } = transcript.stop {
        return Err(Error::PreconditionViolated(format!("the lion captured the man at step {step}")));
    }
    let betas = beta_angles(space, transcript)?;
    let threshold = beta_threshold(k, d);
    let defined: Vec<(usize, f64)> = betas.betas().collect();
    let last_bad = defined.iter().rev().find(|(_, b)| *b < threshold);
    let n_k = match last_bad {
        Some(&(n, _)) if n == defined.last().expect("nonempty").0 => {
            return Err(Error::ThresholdNotMet { threshold, index: n, beta: defined.last().unwrap().1 });
        }
        Some(&(n, _)) => n + 1,
        None if defined.is_empty() => {
            return Err(Error::ThresholdNotMet { threshold, index: 0, beta: f64::NAN });
        }
        None => 1,
    };
    let path = transcript.lion_path();
    let curve = Curve::at_speed(space.clone(), path[n_k..].to_vec(), d)?;
    Ok((n_k, curve))
}

/// Grid check that `curve` is a k-local `√2`-quasi-geodesic.
pub fn verify_mans_win_curve(curve: &Curve, k: f64, grid: usize) -> Result<QGReport> {
    check_quasi_geodesic(curve, SQRT_2, 0.0, grid, Some(k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditStep {
    pub n: usize,
    /// `d(L₀,L_n) + d(L_n,L_{n+1}) − d(L₀,L_{n+1})`: zero iff `L_n ∈ [L₀, L_{n+1}]`.
    pub colinearity: f64,
    /// `|d(L₀, L_{n+1}) − (n+1)D|`.
    pub distance_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureAudit {
    pub pass: bool,
    /// Every residual is exactly zero in rational arithmetic.
    pub exact: bool,
    pub steps: Vec<AuditStep>,
    /// Index `j` of the first lion position `L_j` that breaks the pattern.
    pub first_failure: Option<usize>,
    /// First `n` with `D_n ≤ D`; the audit stops there.
    pub capture_step: Option<usize>,
    /// `d(L₀, L_last)` over the audited steps.
    pub final_distance: f64,
}

impl CaptureAudit {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,colinearity,distance_error\n");
        for s in &self.steps {
            let _ = writeln!(out, "{},{},{}", s.n, s.colinearity, s.distance_error);
        }
        out
    }
}

/// While `D_n > D`, checks `L_n ∈ [L₀, L_{n+1}]` and `d(L₀, L_{n+1}) = (n+1)D`
/// exactly. A passing audit without capture shows the lion is laying out a
/// geodesic from `L₀`.
pub fn rtree_capture_audit(space: &Space, transcript: &Transcript, d: f64) -> Result<CaptureAudit> {
    let tree = space.as_tree().ok_or(Error::UnsupportedSpace(space.kind().name()))?;
    transcript.validate(space)?;
    if !(d.is_finite() && d > 0.0) {
        return Err(invalid("step size D must be positive"));
    }
    let path: Vec<TreePoint> = transcript
        .lion_path()
        .into_iter()
        .map(|p| match p {
            Point::Tree(tp) => tp,
            _ => unreachable!("validated"),
        })
        .collect();
    let dx = exact(d);
    let tol = space.tolerance();
    let l0 = &path[0];
    let mut steps = Vec::new();
    let mut first_failure = None;
    let mut exact_all = true;
    let mut capture_step = None;
    let mut final_distance = BigRational::zero();
    for (n, rec) in transcript.steps.iter().enumerate() {
        if rec.gap <= d {
            capture_step = Some(n);
            break;
        }
        let (ln, next) = (&path[n], &path[n + 1]);
        let d0n = tree.exact_distance(l0, ln);
        let d0next = tree.exact_distance(l0, next);
        let col = &d0n + tree.exact_distance(ln, next) - &d0next;
        let err = (&d0next - &dx * BigRational::from_integer((n + 1).into())).abs();
        if !(col.is_zero() && err.is_zero()) {
            exact_all = false;
        }
        let step = AuditStep { n, colinearity: to_f64(&col), distance_error: to_f64(&err) };
        let scale = tol * ((n + 1) as f64 * d).max(1.0);
        if first_failure.is_none() && (step.colinearity > scale || step.distance_error > scale) {
            first_failure = Some(n + 1);
        }
        steps.push(step);
        final_distance = d0next;
    }
    Ok(CaptureAudit {
        pass: first_failure.is_none(),
        exact: exact_all,
        steps,
        first_failure,
        capture_step: capture_step.or(match transcript.stop {
            StopReason::PhysicalCapture { step } => Some(step),
            StopReason::StepBudget => None,
        }),
        final_distance: to_f64(&final_distance),
    })
}
