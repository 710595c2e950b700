use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use raylab::analysis::{beta_angles, curve_from_transcript, equivalence_report, rtree_capture_audit, verify_mans_win_curve, EquivalenceConfig};
use raylab::config::{Config, GameSection};
use raylab::curves::{
    check_quasi_geodesic, extract_ray_from_directional_sequence, extract_ray_from_quasi_geodesic, l2_example_curve, CurveFile, QGReport,
    RayApprox,
};
use raylab::game::{classify_outcome, run_game, StrategySpec, Transcript};
use raylab::hyperbolicity::{self, TrialConfig};
use raylab::space::{Point, Space};
use raylab::Error;

use crate::{AnalyzeArgs, DemoL2Args, EstimateDeltaArgs, ExtractRayArgs, ManKind, SimulateArgs, SweepArgs, VerifyCurveArgs};

pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::StrategyFault { .. }) => 3,
        _ => 2,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: Option<&Path>, content: &str) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, content).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn load_config(path: &Path) -> Result<Config> {
    Config::from_toml_str(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_curve(path: &Path) -> Result<raylab::curves::Curve> {
    let file = CurveFile::from_json_str(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    Ok(file.build()?)
}

fn load_transcript(path: &Path) -> Result<(Space, Transcript)> {
    let t = Transcript::from_json_str(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let space = Space::from_spec(&t.config.space)?;
    t.validate(&space)?;
    Ok((space, t))
}

fn parse_point(s: Option<&String>, flag: &str) -> Result<Option<Point>> {
    s.map(|s| serde_json::from_str(s).with_context(|| format!("parsing --{flag}"))).transpose()
}

fn name<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".into(), |v| v.to_string())
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

pub fn simulate(a: SimulateArgs) -> Result<Verdict> {
    let cfg = load_config(&a.space)?;
    let g = &cfg.file.game;
    let spec = match a.man {
        ManKind::Stationary => StrategySpec::Stationary,
        ManKind::Greedy => StrategySpec::Greedy { directions: a.directions },
        ManKind::Random => StrategySpec::Random,
        ManKind::Directional => StrategySpec::Directional,
    };
    let seed = a.game.seed.or(g.seed);
    if spec.is_stochastic() && seed.is_none() {
        return Err(Usage("the random man needs --seed (or game.seed in the config)".into()).into());
    }
    let lion = parse_point(a.lion.as_ref(), "lion")?
        .or_else(|| g.lion.clone())
        .ok_or_else(|| anyhow!("no lion start: pass --lion or set game.lion"))?;
    let d = a.game.d.or(g.d).ok_or_else(|| anyhow!("no step size: pass --D or set game.D"))?;
    let curve = a.curve.as_deref().map(load_curve).transpose()?;
    let mut man = spec.build(&cfg.space, &lion, d, curve, seed)?;
    let man_start = parse_point(a.man_start.as_ref(), "man-start")?
        .or_else(|| g.man.clone())
        .or_else(|| man.start())
        .ok_or_else(|| anyhow!("no man start: pass --man-start or set game.man"))?;
    let overrides = GameSection {
        d: Some(d),
        max_steps: a.game.n,
        tol: a.game.tol,
        seed,
        lion: Some(lion),
        man: Some(man_start),
    };
    let game = cfg.game_config(&overrides)?;
    let t = run_game(&game, man.as_mut())?;
    let outcome = classify_outcome(&t, game.d, game.tol)?;
    write(a.out.as_deref(), &t.to_json_string())?;
    write(a.csv.as_deref(), &t.gaps_csv())?;
    println!(
        "outcome: {} capture_step={} steps={} tail_min_excess={} tail_max_excess={}",
        name(&outcome.classification),
        opt(outcome.capture_step),
        t.steps.len(),
        outcome.tail_min_excess,
        outcome.tail_max_excess
    );
    Ok(Verdict::Pass)
}

pub fn analyze(a: AnalyzeArgs) -> Result<Verdict> {
    let (space, t) = load_transcript(&a.transcript)?;
    let (d, tol) = (t.config.d, t.config.tol);
    let outcome = classify_outcome(&t, d, tol)?;
    println!("outcome: {} capture_step={}", name(&outcome.classification), opt(outcome.capture_step));
    let mut pass = true;
    let mut report = json!({ "outcome": outcome });

    match beta_angles(&space, &t) {
        Ok(b) => {
            println!("beta: tail_min={} tail_mean={}", opt(b.tail_min), opt(b.tail_mean));
            write(a.beta_csv.as_deref(), &b.to_csv())?;
            report["beta"] = json!({ "tail_min": b.tail_min, "tail_mean": b.tail_mean, "entries": b.entries });
        }
        Err(e) => println!("beta: unavailable ({e})"),
    }

    if let Some(k) = a.k {
        match curve_from_transcript(&space, &t, k, d) {
            Ok((n_k, curve)) => {
                let qg = verify_mans_win_curve(&curve, k, a.grid)?;
                println!(
                    "curve: {} n_k={} k={} pairs={} worst_lower_ratio={}",
                    if qg.pass { "PASS" } else { "FAIL" },
                    n_k,
                    k,
                    qg.pairs_tested,
                    qg.worst_lower_ratio
                );
                pass &= qg.pass;
                report["curve"] = json!({ "n_k": n_k, "check": qg });
            }
            Err(e @ (Error::ThresholdNotMet { .. } | Error::PreconditionViolated(_))) => {
                println!("curve: FAIL {e}");
                pass = false;
                report["curve"] = json!({ "error": e.to_string() });
            }
            Err(e) => return Err(e.into()),
        }
    }

    if space.as_tree().is_some() {
        let audit = rtree_capture_audit(&space, &t, d)?;
        println!(
            "audit: {} exact={} capture_step={} first_failure={} final_distance={}",
            if audit.pass { "PASS" } else { "FAIL" },
            audit.exact,
            opt(audit.capture_step),
            opt(audit.first_failure),
            audit.final_distance
        );
        pass &= audit.pass;
        write(a.audit_csv.as_deref(), &audit.to_csv())?;
        report["audit"] = json!(audit);
    }
    write(a.out.as_deref(), &pretty(&report))?;
    Ok(Verdict::from(pass))
}

fn witness_csv(reports: &[&QGReport]) -> String {
    let mut out = String::from("lambda,epsilon,kind,bound,s,t,distance,slack\n");
    for r in reports {
        let mut row = |kind: &str, bound: &str, w: &raylab::curves::PairWitness| {
            let _ = writeln!(out, "{},{},{kind},{bound},{},{},{},{}", r.lambda, r.epsilon, w.s, w.t, w.distance, w.slack);
        };
        if let Some((b, w)) = &r.first_violation {
            row("first-violation", &name(b), w);
        }
        if let Some(w) = &r.worst_lower {
            row("worst", "lower", w);
        }
        if let Some(w) = &r.worst_upper {
            row("worst", "upper", w);
        }
    }
    out
}

fn verdict_line(r: &QGReport) -> String {
    let mut line = format!(
        "{} lambda={} epsilon={} pairs={} worst_lower_ratio={} worst_upper_excess={}",
        if r.pass { "PASS" } else { "FAIL" },
        r.lambda,
        r.epsilon,
        r.pairs_tested,
        r.worst_lower_ratio,
        r.worst_upper_excess
    );
    if let Some((b, w)) = &r.first_violation {
        let _ = write!(line, " witness bound={} s={} t={} distance={}", name(b), w.s, w.t, w.distance);
    }
    line
}

pub fn verify_curve(a: VerifyCurveArgs) -> Result<Verdict> {
    let curve = load_curve(&a.curve)?;
    let r = check_quasi_geodesic(&curve, a.lambda, a.epsilon, a.grid, a.k)?;
    println!("{}", verdict_line(&r));
    write(a.out.as_deref(), &pretty(&r))?;
    write(a.witness_csv.as_deref(), &witness_csv(&[&r]))?;
    Ok(Verdict::from(r.pass))
}

fn ray_csv(ray: &RayApprox) -> String {
    let mut out = String::from("k,distance_from_base,last_residual,bound,stop\n");
    for p in &ray.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.k,
            p.distance_from_base,
            p.residuals.last().map(f64::to_string).unwrap_or_default(),
            p.bounds.last().map(f64::to_string).unwrap_or_default(),
            name(&p.stop)
        );
    }
    out
}

pub fn extract_ray(a: ExtractRayArgs) -> Result<Verdict> {
    let ray = match (&a.curve, &a.transcript) {
        (Some(path), None) => {
            let curve = load_curve(path)?;
            if a.directional {
                extract_ray_from_directional_sequence(curve.space(), curve.points(), a.b, a.k_max)?
            } else {
                extract_ray_from_quasi_geodesic(&curve, a.lambda, a.alpha, a.k_max, a.delta_star)?
            }
        }
        (None, Some(path)) => {
            let (space, t) = load_transcript(path)?;
            extract_ray_from_directional_sequence(&space, &t.lion_path(), a.b, a.k_max)?
        }
        _ => return Err(Usage("pass exactly one of --curve or --transcript".into()).into()),
    };
    let angles_hold = ray.angle_checks.iter().all(|c| c.holds(1e-9));
    let bounds_hold = ray
        .points
        .iter()
        .all(|p| p.residuals.iter().zip(&p.bounds).all(|(r, b)| *r <= b * (1.0 + 1e-9) + 1e-9));
    let pass = angles_hold && bounds_hold;
    println!(
        "{} points={} max_distance_error={} max_residual={} max_nesting_residual={} angle_checks={} converged={}",
        if pass { "PASS" } else { "FAIL" },
        ray.points.len(),
        ray.max_distance_error(),
        ray.max_residual(),
        ray.max_nesting_residual(),
        ray.angle_checks.len(),
        ray.points.iter().filter(|p| p.stop == raylab::curves::StopCause::Converged).count()
    );
    write(a.out.as_deref(), &pretty(&ray))?;
    write(a.csv.as_deref(), &ray_csv(&ray))?;
    Ok(Verdict::from(pass))
}

pub fn estimate_delta(a: EstimateDeltaArgs) -> Result<Verdict> {
    let cfg = load_config(&a.space)?;
    let trial = TrialConfig { grid: a.grid, ..TrialConfig::new(a.seed, a.scale, a.trials) };
    let est = hyperbolicity::estimate_delta(&cfg.space, &trial)?;
    println!("space={} trials={} seed={} delta={}", cfg.space.kind().name(), a.trials, a.seed, est.value);
    Ok(Verdict::Pass)
}

pub fn demo_l2(a: DemoL2Args) -> Result<Verdict> {
    let curve = l2_example_curve(a.dim, a.base, 0)?;
    let lambda = (11.0f64 / 3.0).sqrt();
    let good = check_quasi_geodesic(&curve, lambda, 0.0, a.grid, None)?;
    let geodesic = check_quasi_geodesic(&curve, 1.0, 0.0, a.grid, None)?;
    println!("{}", verdict_line(&good));
    println!("{}", verdict_line(&geodesic));
    write(a.out.as_deref(), &pretty(&json!({ "quasi_geodesic": good, "geodesic": geodesic })))?;
    write(a.witness_csv.as_deref(), &witness_csv(&[&good, &geodesic]))?;
    Ok(Verdict::from(good.pass))
}

pub fn sweep(a: SweepArgs) -> Result<Verdict> {
    let cfg = load_config(&a.space)?;
    let mut eq = EquivalenceConfig::new(a.d, a.n, a.seed);
    eq.tol = a.tol;
    eq.runs = a.runs;
    eq.scale = a.scale;
    eq.k = a.k;
    eq.curve = a.curve.as_deref().map(load_curve).transpose()?;
    let r = equivalence_report(&cfg.space, cfg.domain(), &eq)?;
    if r.runs.is_empty() {
        bail!("no runs were scheduled");
    }
    for run in &r.runs {
        println!(
            "{} run={} outcome={} capture_step={} certificate={} audit={}",
            run.strategy,
            run.run,
            name(&run.classification),
            opt(run.capture_step),
            opt(run.certificate),
            opt(run.audit_pass)
        );
    }
    println!(
        "space={} geodesically_bounded={} exploratory={} lion_always_won={} certificates={} rays={}",
        r.space,
        opt(r.hypotheses.geodesically_bounded),
        r.hypotheses.exploratory,
        r.lion_always_won,
        r.certificates_passed,
        r.rays_extracted
    );
    write(a.out.as_deref(), &pretty(&r))?;
    Ok(Verdict::Pass)
}
