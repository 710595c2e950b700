//! A desk-scale experiment around the main equivalence for convex domains
//! of CAT(0) Gromov hyperbolic spaces: geodesic boundedness versus the lion
//! always winning. Runs a battery of man strategies and collects outcomes,
//! man-wins curve certificates and ray extractions. It reports what was
//! observed and concludes nothing beyond that.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{curve_from_transcript, rtree_capture_audit, verify_mans_win_curve};
use crate::curves::{extract_ray_from_directional_sequence, Curve};
use crate::error::{invalid, Result};
use crate::game::{classify_outcome, run_game, Classification, GameConfig, ManStrategy, StrategySpec, Transcript};
use crate::space::{DomainSpec, Point, PointSampler, Space};

/// Parameters of the strategy battery.
#[derive(Debug, Clone)]
pub struct EquivalenceConfig {
    pub d: f64,
    pub max_steps: usize,
    pub tol: f64,
    /// Random start configurations per undirected strategy.
    pub runs: usize,
    pub seed: u64,
    /// Extent of the region start points are drawn from.
    pub scale: f64,
    pub greedy_directions: usize,
    /// Locality for man-wins curve certificates (default `12·D`).
    pub k: Option<f64>,
    pub grid: usize,
    /// Directional curve for the directional man; ray trees supply their own.
    pub curve: Option<Curve>,
}

impl EquivalenceConfig {
    pub fn new(d: f64, max_steps: usize, seed: u64) -> Self {
        EquivalenceConfig {
            d,
            max_steps,
            tol: 1e-9,
            runs: 4,
            seed,
            scale: 10.0,
            greedy_directions: 16,
            k: None,
            grid: 120,
            curve: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub cat0: bool,
    pub gromov_hyperbolic: bool,
    /// Whether the domain contains no geodesic ray, when decidable from its
    /// description.
    pub geodesically_bounded: Option<bool>,
    /// Set when the theorem's hypotheses fail: results are exploratory.
    pub exploratory: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub strategy: String,
    pub run: usize,
    pub classification: Classification,
    pub capture_step: Option<usize>,
    pub steps: usize,
    pub final_gap: f64,
    /// `n_k` when a man-wins curve was cut from the transcript.
    pub n_k: Option<usize>,
    /// Verdict of the k-local √2-quasi-geodesic check on that curve.
    pub certificate: Option<bool>,
    pub certificate_note: Option<String>,
    pub audit_pass: Option<bool>,
    /// Largest Cauchy residual when a ray was extracted from the lion path.
    pub ray_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub space: String,
    pub hypotheses: Hypotheses,
    pub runs: Vec<RunSummary>,
    /// Every run ended with the lion winning (physically or in the limit).
    pub lion_always_won: bool,
    pub certificates_passed: usize,
    pub rays_extracted: usize,
    /// A directional curve was supplied or found in the domain, so the domain
    /// is not directionally bounded.
    pub directional_curve_available: bool,
}

/// Whether `domain` contains no geodesic ray, when that follows from its
/// description alone.
pub fn geodesically_bounded(space: &Space, domain: &DomainSpec) -> Option<bool> {
    Some(match (space, domain) {
        (_, DomainSpec::Ball { .. }) | (_, DomainSpec::Box) => true,
        (Space::L2Box { .. }, DomainSpec::Whole) => true,
        (Space::Tree(t), DomainSpec::Whole) => t.ray_edge().is_none(),
        (Space::Tree(t), DomainSpec::Subtree { edges }) => t.ray_edge().map_or(true, |r| !edges.contains(&r)),
        (Space::Euclidean { .. } | Space::Hyperbolic, DomainSpec::Whole) => false,
        _ => return None,
    })
}

struct Job {
    strategy: StrategySpec,
    run: usize,
}

fn summarize(space: &Space, cfg: &EquivalenceConfig, t: &Transcript, run: usize) -> Result<RunSummary> {
    let outcome = classify_outcome(t, cfg.d, cfg.tol)?;
    let k = cfg.k.unwrap_or(12.0 * cfg.d);
    let mut summary = RunSummary {
        strategy: t.strategy.clone(),
        run,
        classification: outcome.classification,
        capture_step: outcome.capture_step,
        steps: t.steps.len(),
        final_gap: t.steps.last().map_or(0.0, |s| s.gap),
        n_k: None,
        certificate: None,
        certificate_note: None,
        audit_pass: None,
        ray_residual: None,
    };
    if space.as_tree().is_some() {
        summary.audit_pass = Some(rtree_capture_audit(space, t, cfg.d)?.pass);
    }
    if outcome.capture_step.is_none() && t.steps.len() >= 2 {
        match curve_from_transcript(space, t, k, cfg.d) {
            Ok((n_k, curve)) => {
                summary.n_k = Some(n_k);
                summary.certificate = Some(verify_mans_win_curve(&curve, k, cfg.grid)?.pass);
            }
            Err(e) => summary.certificate_note = Some(e.to_string()),
        }
        if summary.certificate == Some(true) {
            let path = t.lion_path();
            let reach = space.distance(&path[0], path.last().expect("nonempty"))?;
            let k_max = (reach.floor() as u32).min(10);
            if k_max >= 1 {
                if let Ok(ray) = extract_ray_from_directional_sequence(space, &path, 0.0, k_max) {
                    summary.ray_residual = Some(ray.max_residual());
                }
            }
        }
    }
    Ok(summary)
}

/// Runs stationary, greedy and random men from `runs` seeded start
/// configurations, plus the directional man when a directional curve is
/// available, and collates the outcomes.
pub fn equivalence_report(space: &Space, domain: &DomainSpec, cfg: &EquivalenceConfig) -> Result<EquivalenceReport> {
    space.validate_domain(domain)?;
    if cfg.runs == 0 {
        return Err(invalid("runs must be positive"));
    }
    let kind = space.kind();
    let bounded = geodesically_bounded(space, domain);
    let hypotheses = Hypotheses {
        cat0: true,
        gromov_hyperbolic: kind.is_gromov_hyperbolic(),
        geodesically_bounded: bounded,
        exploratory: !kind.is_gromov_hyperbolic(),
    };

    let mut jobs = Vec::new();
    for strategy in [
        StrategySpec::Stationary,
        StrategySpec::Greedy { directions: cfg.greedy_directions },
        StrategySpec::Random,
    ] {
        for run in 0..cfg.runs {
            jobs.push(Job { strategy: strategy.clone(), run });
        }
    }
    let ray_tree = space.as_tree().is_some_and(|t| t.ray_edge().is_some()) && matches!(domain, DomainSpec::Whole);
    let directional_curve_available = cfg.curve.is_some() || ray_tree;
    if directional_curve_available {
        jobs.push(Job { strategy: StrategySpec::Directional, run: 0 });
    }

    let runs: Vec<RunSummary> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| {
            let (lion_start, man_start, mut man): (Point, Point, Box<dyn ManStrategy>) = match &job.strategy {
                StrategySpec::Directional => {
                    let lion = match &cfg.curve {
                        Some(c) => c.eval(c.start())?,
                        None => Point::vertex(0),
                    };
                    let man = job.strategy.build(space, &lion, cfg.d, cfg.curve.clone(), None)?;
                    let start = man.start().ok_or_else(|| invalid("directional curve too short for the first move"))?;
                    (lion, start, man)
                }
                other => {
                    let mut sampler = PointSampler::for_stream(cfg.seed, cfg.scale, job.run as u64);
                    let lion = sampler.sample_in(space, domain);
                    let man = sampler.sample_in(space, domain);
                    let seed = cfg.seed.wrapping_add(i as u64);
                    (lion.clone(), man, other.build(space, &lion, cfg.d, None, Some(seed))?)
                }
            };
            let game = GameConfig {
                space: space.spec(),
                domain: domain.clone(),
                d: cfg.d,
                max_steps: cfg.max_steps,
                tol: cfg.tol,
                lion_start,
                man_start,
                seed: Some(cfg.seed),
            };
            let t = run_game(&game, man.as_mut())?;
            summarize(space, cfg, &t, job.run)
        })
        .collect::<Result<_>>()?;

    Ok(EquivalenceReport {
        space: kind.name().into(),
        hypotheses,
        lion_always_won: runs
            .iter()
            .all(|r| matches!(r.classification, Classification::LionWinsPhysical | Classification::LionWinsLimit)),
        certificates_passed: runs.iter().filter(|r| r.certificate == Some(true)).count(),
        rays_extracted: runs.iter().filter(|r| r.ray_residual.is_some()).count(),
        directional_curve_available,
        runs,
    })
}
