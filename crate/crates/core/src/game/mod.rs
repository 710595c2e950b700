//! The discrete Lion-Man game.
//!
//! Step `n`: the lion moves from `L_n` toward `M_n` by `min(D, D_n)` where
//! `D_n = d(L_n, M_n)`, then the man moves from `M_n` to some `M_{n+1}` with
//! `d(M_n, M_{n+1}) ≤ D`. The run stops at physical capture (`D_n ≤ D`, so
//! that `d(L_{n+1}, M_n) = 0`) or after `max_steps` steps.

pub mod strategy;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::space::{DomainSpec, Point, Space, SpaceSpec};

pub use strategy::{
    candidate_moves, man_directional_strategy, man_greedy_strategy, man_random_strategy, man_scripted_strategy, ray_curve, Directional,
    Greedy, ManMove, ManStrategy, MoveContext, RandomWalk, Scripted, Stationary, StrategySpec,
};

/// Relative slack allowed on the man's speed before a move is clamped.
const SPEED_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub space: SpaceSpec,
    #[serde(default)]
    pub domain: DomainSpec,
    /// Step size `D`.
    #[serde(rename = "D")]
    pub d: f64,
    /// Step budget `N`.
    #[serde(rename = "N")]
    pub max_steps: usize,
    pub tol: f64,
    pub lion_start: Point,
    pub man_start: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl GameConfig {
    pub fn validate(&self, space: &Space) -> Result<()> {
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(invalid("step size D must be positive"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(invalid("capture tolerance must be positive"));
        }
        if self.max_steps == 0 {
            return Err(invalid("step budget N must be at least 1"));
        }
        space.validate_domain(&self.domain)?;
        for (who, p) in [("lion", &self.lion_start), ("man", &self.man_start)] {
            if !space.domain_contains(&self.domain, p)? {
                return Err(invalid(format!("{who} starts outside the domain")));
            }
        }
        Ok(())
    }
}

/// `L_{n+1}`: the point of `[L, M]` at distance `min(D, d(L, M))` from `L`.
pub fn lion_step(space: &Space, lion: &Point, man: &Point, d: f64) -> Result<Point> {
    if !(d.is_finite() && d > 0.0) {
        return Err(invalid("step size D must be positive"));
    }
    if space.distance(lion, man)? <= d {
        return Ok(man.clone());
    }
    space.point_toward(lion, man, d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MoveEvent {
    /// The strategy proposed a move of this length (> D); it was shortened to D.
    Clamped { proposed: f64 },
    /// The strategy found no admissible move.
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    pub lion: Point,
    pub man: Point,
    /// `D_n = d(L_n, M_n)`.
    pub gap: f64,
    /// `d(L_{n+1}, M_n)`.
    pub gap_after: f64,
    /// Whether the move to `M_{n+1}` was clamped.
    pub clamped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<MoveEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StopReason {
    PhysicalCapture { step: usize },
    StepBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub config: GameConfig,
    pub strategy: String,
    pub steps: Vec<StepRecord>,
    /// Lion position after the last recorded step.
    pub final_lion: Point,
    /// Man position after the last recorded step.
    pub final_man: Point,
    pub stop: StopReason,
}

impl Transcript {
    /// `L₀, L₁, …` including the position after the last step.
    pub fn lion_path(&self) -> Vec<Point> {
        let mut out: Vec<Point> = self.steps.iter().map(|s| s.lion.clone()).collect();
        out.push(self.final_lion.clone());
        out
    }

    /// `M₀, M₁, …`; after a capture the man has not moved again.
    pub fn man_path(&self) -> Vec<Point> {
        let mut out: Vec<Point> = self.steps.iter().map(|s| s.man.clone()).collect();
        if self.stop == StopReason::StepBudget {
            out.push(self.final_man.clone());
        }
        out
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.gap).collect()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts serialize")
    }

    /// CSV with columns `n,D_n`.
    pub fn gaps_csv(&self) -> String {
        let mut out = String::from("n,D_n\n");
        for s in &self.steps {
            let _ = writeln!(out, "{},{}", s.n, s.gap);
        }
        out
    }

    /// Checks the transcript against its own config: points in the space and
    /// domain, consecutive step indices.
    pub fn validate(&self, space: &Space) -> Result<()> {
        if space.spec() != self.config.space {
            return Err(invalid("transcript was recorded in a different space"));
        }
        if self.steps.is_empty() {
            return Err(invalid("transcript has no steps"));
        }
        for (i, s) in self.steps.iter().enumerate() {
            if s.n != i {
                return Err(invalid(format!("step {i} is numbered {}", s.n)));
            }
            space.validate(&s.lion)?;
            space.validate(&s.man)?;
        }
        space.validate(&self.final_lion)?;
        space.validate(&self.final_man)
    }
}

/// Plays the game from `config` against `man`.
pub fn run_game(config: &GameConfig, man: &mut dyn ManStrategy) -> Result<Transcript> {
    let space = Space::from_spec(&config.space)?;
    config.validate(&space)?;
    let d = config.d;
    let mut lion = config.lion_start.clone();
    let mut m = config.man_start.clone();
    let mut steps = Vec::with_capacity(config.max_steps.min(1 << 16));
    let mut stop = StopReason::StepBudget;
    for n in 0..config.max_steps {
        let gap = space.distance(&lion, &m)?;
        let next_lion = lion_step(&space, &lion, &m, d)?;
        let gap_after = space.distance(&next_lion, &m)?;
        // `D_n ≤ D` puts the lion on the man. A gap that is merely within
        // `tol` of `D` keeps the run going: that is the limit regime.
        if gap <= d && gap_after <= config.tol {
            steps.push(StepRecord { n, lion, man: m.clone(), gap, gap_after, clamped: false, event: None });
            lion = next_lion;
            stop = StopReason::PhysicalCapture { step: n };
            break;
        }
        let ctx = MoveContext {
            space: &space,
            domain: &config.domain,
            step: n,
            d,
            lion: &next_lion,
            man: &m,
        };
        let (next_man, event) = match man.next(&ctx)? {
            ManMove::Stay => (m.clone(), Some(MoveEvent::Stationary)),
            ManMove::To(p) => {
                let inside = space
                    .domain_contains(&config.domain, &p)
                    .map_err(|e| Error::StrategyFault { step: n, reason: e.to_string() })?;
                if !inside {
                    return Err(Error::StrategyFault {
                        step: n,
                        reason: "proposed point lies outside the domain".into(),
                    });
                }
                let len = space.distance(&m, &p)?;
                if len > d * (1.0 + SPEED_SLACK) {
                    (space.point_toward(&m, &p, d)?, Some(MoveEvent::Clamped { proposed: len }))
                } else {
                    (p, None)
                }
            }
        };
        steps.push(StepRecord {
            n,
            lion,
            man: m,
            gap,
            gap_after,
            clamped: matches!(event, Some(MoveEvent::Clamped { .. })),
            event,
        });
        lion = next_lion;
        m = next_man;
    }
    Ok(Transcript {
        config: config.clone(),
        strategy: man.name(),
        steps,
        final_lion: lion,
        final_man: m,
        stop,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    LionWinsPhysical,
    LionWinsLimit,
    ManWinsObserved,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub classification: Classification,
    /// First `n` with `D_n ≤ D`.
    pub capture_step: Option<usize>,
    /// First step of the tail window (final 10% of steps).
    pub tail_from: usize,
    /// Smallest and largest `D_n − D` over the tail.
    pub tail_min_excess: f64,
    pub tail_max_excess: f64,
    pub margin: f64,
}

/// Margin used by [`classify_outcome`]: `max(D/10, 10·tol)`.
pub fn default_margin(d: f64, tol: f64) -> f64 {
    (0.1 * d).max(10.0 * tol)
}

pub fn classify_outcome(transcript: &Transcript, d: f64, tol: f64) -> Result<Outcome> {
    classify_outcome_with_margin(transcript, d, tol, default_margin(d, tol))
}

/// Physical capture if some `D_n ≤ D`. Otherwise, over the final 10% of
/// steps: limit capture if `D_n − D ≤ tol` throughout, man's win if
/// `D_n − D ≥ margin` throughout, undecided otherwise.
pub fn classify_outcome_with_margin(transcript: &Transcript, d: f64, tol: f64, margin: f64) -> Result<Outcome> {
    let gaps = transcript.gaps();
    if gaps.is_empty() {
        return Err(invalid("transcript has no steps"));
    }
    if !(margin > tol) {
        return Err(invalid("margin must exceed the tolerance"));
    }
    let capture_step = gaps.iter().position(|&g| g <= d);
    let tail_len = (gaps.len() / 10).max(1);
    let tail_from = gaps.len() - tail_len;
    let excess = gaps[tail_from..].iter().map(|g| g - d);
    let tail_min_excess = excess.clone().fold(f64::INFINITY, f64::min);
    let tail_max_excess = excess.fold(f64::NEG_INFINITY, f64::max);
    let classification = if capture_step.is_some() {
        Classification::LionWinsPhysical
    } else if tail_max_excess <= tol {
        Classification::LionWinsLimit
    } else if tail_min_excess >= margin {
        Classification::ManWinsObserved
    } else {
        Classification::Undecided
    };
    Ok(Outcome {
        classification,
        capture_step,
        tail_from,
        tail_min_excess,
        tail_max_excess,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{EdgeSpec, RTree};

    fn segment_config() -> GameConfig {
        GameConfig {
            space: SpaceSpec::Euclidean { dim: 1 },
            domain: DomainSpec::Ball { center: Point::euclidean([5.0]), radius: 5.0 },
            d: 1.0,
            max_steps: 100,
            tol: 1e-9,
            lion_start: Point::euclidean([0.0]),
            man_start: Point::euclidean([10.0]),
            seed: None,
        }
    }

    #[test]
    fn lion_step_examples() {
        let s = Space::euclidean(2).unwrap();
        let o = Point::euclidean([0.0, 0.0]);
        assert_eq!(lion_step(&s, &o, &Point::euclidean([5.0, 0.0]), 1.0).unwrap(), Point::euclidean([1.0, 0.0]));
        assert_eq!(lion_step(&s, &o, &Point::euclidean([0.5, 0.0]), 1.0).unwrap(), Point::euclidean([0.5, 0.0]));
        let t = Space::tree(RTree::new(4, &[EdgeSpec(0, 1, 1.0), EdgeSpec(0, 2, 1.0), EdgeSpec(0, 3, 1.0)], None).unwrap());
        assert_eq!(lion_step(&t, &Point::vertex(1), &Point::vertex(2), 1.0).unwrap(), Point::vertex(0));
    }

    #[test]
    fn stationary_man_on_a_segment() {
        let t = run_game(&segment_config(), &mut Stationary).unwrap();
        assert_eq!(t.stop, StopReason::PhysicalCapture { step: 9 });
        assert_eq!(t.steps.len(), 10);
        assert_eq!(t.gaps(), (1..=10).rev().map(f64::from).collect::<Vec<_>>());
        assert_eq!(t.final_lion, Point::euclidean([10.0]));
        let o = classify_outcome(&t, 1.0, 1e-9).unwrap();
        assert_eq!(o.classification, Classification::LionWinsPhysical);
        assert_eq!(o.capture_step, Some(9));
    }

    #[test]
    fn out_of_domain_proposal_is_a_fault() {
        let mut s = man_scripted_strategy(vec![Point::euclidean([11.0])]);
        let r = run_game(&segment_config(), &mut s);
        assert!(matches!(r, Err(Error::StrategyFault { step: 0, .. })));
    }

    #[test]
    fn long_moves_are_clamped() {
        let mut cfg = segment_config();
        cfg.man_start = Point::euclidean([6.0]);
        let mut s = man_scripted_strategy(vec![Point::euclidean([10.0])]);
        let t = run_game(&cfg, &mut s).unwrap();
        assert!(t.steps[0].clamped);
        assert_eq!(t.steps[1].man, Point::euclidean([7.0]));
    }

    #[test]
    fn transcript_round_trip() {
        let t = run_game(&segment_config(), &mut Stationary).unwrap();
        let back = Transcript::from_json_str(&t.to_json_string()).unwrap();
        assert_eq!(back, t);
        assert!(t.gaps_csv().starts_with("n,D_n\n0,10\n"));
    }
}
