//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails. Run with `cargo test -p raylab --test acceptance`.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use raylab::analysis::{beta_angles, curve_from_transcript, rtree_capture_audit, verify_mans_win_curve};
use raylab::curves::{
    check_directional_sequence, check_quasi_geodesic, extract_ray_from_directional_sequence, extract_ray_from_quasi_geodesic,
    l2_example_curve, promote_constants, zigzag_polyline, Bound, Curve,
};
use raylab::game::{
    lion_step, man_directional_strategy, ray_curve, run_game, GameConfig, ManMove, MoveContext, StopReason, StrategySpec, Transcript,
};
use raylab::hyperbolicity::{cat_defect, check_gromov_criterion, estimate_delta, TrialConfig};
use raylab::space::{DomainSpec, EdgeSpec, Point, PointSampler, RTree, Space, TreePoint};
use raylab::{Error, Result};

type Verdict = Result<(bool, String)>;

fn l2_example() -> Verdict {
    let started = Instant::now();
    let curve = l2_example_curve(6, 10.0, 0)?;
    let lambda = (11.0f64 / 3.0).sqrt();
    let good = check_quasi_geodesic(&curve, lambda, 0.0, 500, None)?;
    let flat = check_quasi_geodesic(&curve, 1.0, 0.0, 500, None)?;
    let elapsed = started.elapsed().as_secs_f64();
    // γ(110) is the corner (10, 100, 0, ...).
    let oracle = (10.0f64 * 10.0 + 100.0 * 100.0).sqrt();
    let witness = flat.first_violation.map(|(b, w)| (b, w.s, w.t, w.distance));
    let witness_ok = matches!(witness, Some((Bound::Lower, s, t, d)) if s == 0.0 && t == 110.0 && (d - oracle).abs() <= 1e-9 * oracle);
    let ratio_ok = good.worst_lower_ratio >= 1.0 / lambda - 1e-9;
    let pass = good.pass && ratio_ok && !flat.pass && witness_ok && elapsed < 1.0;
    Ok((
        pass,
        format!(
            "lambda=sqrt(11/3) pass={} worst_ratio={:.12} (floor {:.12}); lambda=1 witness={:?}; {:.3}s",
            good.pass,
            good.worst_lower_ratio,
            1.0 / lambda,
            witness.map(|(_, s, t, d)| (s, t, d)),
            elapsed
        ),
    ))
}

fn promotion_formula() -> Verdict {
    let (lambda_star, eps) = promote_constants(SQRT_2, 1.0, 12.0)?;
    let oracle = 1.0 / (1.0 / SQRT_2 - 4.0 / (6.0 + SQRT_2));
    let refused = matches!(promote_constants(SQRT_2, 1.0, 11.0), Err(Error::PreconditionViolated(_)));
    let pass = (lambda_star - oracle).abs() <= 1e-9 && (lambda_star - 5.966).abs() < 1e-3 && eps == 2.0 && refused;
    Ok((pass, format!("lambda*={lambda_star:.12} oracle={oracle:.12} epsilon={eps} k=11 refused={refused}")))
}

fn random_tree(rng: &mut ChaCha8Rng) -> RTree {
    let n = rng.gen_range(5..=14);
    let edges: Vec<EdgeSpec> = (1..n).map(|v| EdgeSpec(rng.gen_range(0..v), v, rng.gen_range(1..=12) as f64 / 4.0)).collect();
    RTree::new(n, &edges, None).expect("valid tree")
}

/// Sampled point with its offset rounded to a multiple of 1/64, so that all
/// later positions stay exactly representable.
fn dyadic_sample(sampler: &mut PointSampler, space: &Space) -> Point {
    match sampler.sample(space) {
        Point::Tree(TreePoint::Edge { edge, offset }) => Point::on_edge(edge, (offset * 64.0).round() / 64.0),
        p => p,
    }
}

fn check_rules(space: &Space, t: &Transcript, spec: &StrategySpec, seed: u64) -> Result<Option<String>> {
    let d = t.config.d;
    let lions = t.lion_path();
    for (n, s) in t.steps.iter().enumerate() {
        let moved = space.distance(&lions[n], &lions[n + 1])?;
        if (moved - d.min(s.gap)).abs() > 1e-9 {
            return Ok(Some(format!("lion move {n}: {moved} vs min(D, D_n) = {}", d.min(s.gap))));
        }
        if n > 0 && t.steps[n - 1].gap > d && s.gap > t.steps[n - 1].gap + 1e-9 {
            return Ok(Some(format!("D_n increased at {n}")));
        }
    }
    if let StopReason::PhysicalCapture { step } = t.stop {
        // Keep playing past capture and check the lion stays on the man.
        let mut man = spec.build(space, &t.config.lion_start, d, None, Some(seed ^ 0x5eed))?;
        let (mut lion, mut m) = (t.final_lion.clone(), t.steps[step].man.clone());
        for extra in 0..20 {
            let next_lion = lion_step(space, &lion, &m, d)?;
            if space.distance(&next_lion, &m)? > t.config.tol {
                return Ok(Some(format!("absorption broken {extra} steps after capture")));
            }
            let ctx = MoveContext { space, domain: &t.config.domain, step: step + 1 + extra, d, lion: &next_lion, man: &m };
            let next_man = match man.next(&ctx)? {
                ManMove::To(p) if space.domain_contains(&t.config.domain, &p)? => {
                    if space.distance(&m, &p)? > d {
                        space.point_toward(&m, &p, d)?
                    } else {
                        p
                    }
                }
                _ => m.clone(),
            };
            lion = next_lion;
            m = next_man;
        }
    }
    Ok(None)
}

fn game_rule_sweep() -> Verdict {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let setups: Vec<(Space, DomainSpec)> = vec![
        (Space::euclidean(2)?, DomainSpec::Ball { center: Point::euclidean([0.0, 0.0]), radius: 8.0 }),
        (Space::hyperbolic(), DomainSpec::Ball { center: Point::hyperbolic(0.0, 0.0), radius: 4.0 }),
        (Space::tree(random_tree(&mut rng)), DomainSpec::Whole),
        (Space::l2box(4, 3.0)?, DomainSpec::Box),
    ];
    let strategies = [StrategySpec::Stationary, StrategySpec::Greedy { directions: 12 }, StrategySpec::Random];
    let mut runs = 0;
    let mut captures = 0;
    for (si, (space, domain)) in setups.iter().enumerate() {
        for i in 0..50u64 {
            let seed = 1000 * si as u64 + i;
            let mut sampler = PointSampler::for_stream(7, 8.0, seed);
            let lion = sampler.sample_in(space, domain);
            let man_start = sampler.sample_in(space, domain);
            let spec = &strategies[i as usize % 3];
            let cfg = GameConfig {
                space: space.spec(),
                domain: domain.clone(),
                d: 0.5 + (i % 4) as f64 * 0.25,
                max_steps: 300,
                tol: 1e-9,
                lion_start: lion.clone(),
                man_start,
                seed: Some(seed),
            };
            let mut man = spec.build(space, &lion, cfg.d, None, Some(seed))?;
            let t = run_game(&cfg, man.as_mut())?;
            if let Some(why) = check_rules(space, &t, spec, seed)? {
                return Ok((false, format!("{} run {i}: {why}", space.kind().name())));
            }
            captures += matches!(t.stop, StopReason::PhysicalCapture { .. }) as usize;
            runs += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    Ok((elapsed < 30.0, format!("{runs} runs, {captures} physical captures, all invariants hold; {elapsed:.2}s")))
}

fn ray_tree() -> Result<Space> {
    Ok(Space::tree(RTree::new(3, &[EdgeSpec(0, 1, 1.0), EdgeSpec(1, 2, 1.0)], Some(2))?))
}

fn directional_ray_transcript(steps: usize) -> Result<(Space, Transcript)> {
    let space = ray_tree()?;
    let curve = ray_curve(&space, &Point::vertex(0))?;
    let mut man = man_directional_strategy(curve.clone(), 1.0)?;
    let cfg = GameConfig {
        space: space.spec(),
        domain: DomainSpec::Whole,
        d: 1.0,
        max_steps: steps,
        tol: 1e-9,
        lion_start: Point::vertex(0),
        man_start: curve.eval(3.0)?,
        seed: None,
    };
    let t = run_game(&cfg, &mut man)?;
    Ok((space, t))
}

fn rtree_dichotomy() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut games = 0;
    for tree_ix in 0..10u64 {
        let space = Space::tree(random_tree(&mut rng));
        for spec in [StrategySpec::Greedy { directions: 16 }, StrategySpec::Stationary] {
            let mut sampler = PointSampler::for_stream(99, 50.0, tree_ix);
            let lion = dyadic_sample(&mut sampler, &space);
            let cfg = GameConfig {
                space: space.spec(),
                domain: DomainSpec::Whole,
                d: 1.0,
                max_steps: 10_000,
                tol: 1e-9,
                lion_start: lion.clone(),
                man_start: dyadic_sample(&mut sampler, &space),
                seed: None,
            };
            let mut man = spec.build(&space, &lion, 1.0, None, None)?;
            let t = run_game(&cfg, man.as_mut())?;
            let audit = rtree_capture_audit(&space, &t, 1.0)?;
            let captured = matches!(t.stop, StopReason::PhysicalCapture { .. });
            if !(captured && audit.pass && audit.exact && audit.capture_step.is_some()) {
                return Ok((false, format!("tree {tree_ix} {:?}: captured={captured} audit pass={} exact={}", spec, audit.pass, audit.exact)));
            }
            games += 1;
        }
    }
    let (space, t) = directional_ray_transcript(500)?;
    let min_gap = t.gaps().into_iter().fold(f64::INFINITY, f64::min);
    let audit = rtree_capture_audit(&space, &t, 1.0)?;
    let unbounded_ok = t.steps.len() == 500 && min_gap >= 2.0 && audit.pass && audit.exact && audit.final_distance == 500.0;
    Ok((
        unbounded_ok,
        format!(
            "{games} finite-tree games captured with exact audits; ray tree: min D_n={min_gap}, audit exact={} d(L0,L_N)={}",
            audit.exact, audit.final_distance
        ),
    ))
}

fn man_wins_pipeline() -> Verdict {
    let (space, t) = directional_ray_transcript(500)?;
    let betas = beta_angles(&space, &t)?;
    let all_pi = betas.entries.iter().filter(|e| e.n >= 2).all(|e| e.beta == Some(PI));
    let (n_k, curve) = curve_from_transcript(&space, &t, 12.0, 1.0)?;
    let qg = verify_mans_win_curve(&curve, 12.0, 300)?;
    Ok((
        all_pi && n_k <= 2 && qg.pass,
        format!("beta_n = pi for n>=2: {all_pi}; n_k={n_k}; sqrt2 check pass={} over {} pairs", qg.pass, qg.pairs_tested),
    ))
}

/// Hyperbolic distance from a disk point to the real diameter.
fn distance_to_real_axis(p: &Point) -> f64 {
    let z = p.coords().expect("disk point");
    let r2 = z[0] * z[0] + z[1] * z[1];
    (2.0 * z[1].abs() / (1.0 - r2)).asinh()
}

fn ray_extraction() -> Verdict {
    let space = Space::hyperbolic();
    let far = Point::hyperbolic((15.0f64).tanh(), 0.0);
    let zigzag = zigzag_polyline(&space, &Point::hyperbolic(0.0, 0.0), &far, 60, 0.125, 1.0)?;
    let curve = Curve::from_polyline(space.clone(), zigzag)?;
    let cert = check_quasi_geodesic(&curve, SQRT_2, 0.0, 400, None)?;
    if !cert.pass {
        return Ok((false, format!("tube curve is not certified sqrt2-quasi-geodesic: {:?}", cert.first_violation)));
    }
    let ray = extract_ray_from_quasi_geodesic(&curve, SQRT_2, 2.0, 10, 0.9)?;
    let worst_axis = ray.points.iter().map(|p| distance_to_real_axis(&p.point)).fold(0.0, f64::max);
    let worst_decay = ray
        .points
        .iter()
        .flat_map(|p| p.residuals.windows(2).map(|w| w[1] / w[0]))
        .fold(0.0, f64::max);
    let tube_ok = ray.points.len() == 10 && worst_axis <= 0.05 && worst_decay <= 0.6;

    let tree = ray_tree()?;
    let exact = ray_curve(&tree, &Point::vertex(0))?;
    let tree_ray = extract_ray_from_quasi_geodesic(&exact, 1.0, 2.0, 10, 0.0)?;
    let zero = tree_ray.points.iter().all(|p| p.residuals.iter().all(|&r| r == 0.0));
    Ok((
        tube_ok && zero,
        format!("tube: max axis distance {worst_axis:.2e}, worst residual ratio {worst_decay:.3}; tree residuals all zero: {zero}"),
    ))
}

fn directional_construction() -> Verdict {
    let space = Space::euclidean(2)?;
    let b = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let raw: Vec<[f64; 2]> = (0..60).map(|n| [(n * n) as f64, rng.gen_range(-0.25..=0.25) * b]).collect();
    let points: Vec<Point> = raw.iter().map(|&c| Point::euclidean(c)).collect();
    let report = check_directional_sequence(&space, &points, b, 2000, 1)?;
    if !report.pass {
        return Ok((false, format!("fixture is not directional with b={b}")));
    }
    // Planar oracle over every pair m < n.
    let x0 = raw[0];
    let rel = |c: [f64; 2]| [c[0] - x0[0], c[1] - x0[1]];
    let mut worst = f64::NEG_INFINITY;
    for m in 1..raw.len() {
        for n in m + 1..raw.len() {
            let (u, v) = (rel(raw[m]), rel(raw[n]));
            let (dm, dn) = (u[0].hypot(u[1]), v[0].hypot(v[1]));
            let angle = (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]).abs();
            let lhs = (angle / 2.0).sin().powi(2);
            let rhs = (b / (2.0 * dm)) * (b / (2.0 * dn) + 1.0);
            worst = worst.max(lhs - rhs);
        }
    }
    let ray = extract_ray_from_directional_sequence(&space, &points, b, 10)?;
    let library_checks = ray.angle_checks.iter().all(|c| c.holds(1e-9));
    let worst_dir = ray
        .points
        .iter()
        .map(|p| {
            let c = rel(p.point.coords().expect("planar").try_into().expect("2d"));
            c[1].atan2(c[0]).abs()
        })
        .fold(0.0, f64::max);
    Ok((
        worst <= 1e-9 && library_checks && worst_dir <= 0.01,
        format!("max sin^2 excess over all pairs {worst:.3e}; library checks hold: {library_checks}; max direction error {worst_dir:.2e}"),
    ))
}

fn hyperbolicity_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let trees: Vec<Space> = (0..5).map(|_| Space::tree(random_tree(&mut rng))).collect();
    let mut deltas = Vec::new();
    for t in &trees {
        deltas.push(estimate_delta(t, &TrialConfig::new(3, 20.0, 50))?.value);
    }
    let deltas_zero = deltas.iter().all(|&d| d == 0.0);

    let spaces = [Space::euclidean(3)?, Space::hyperbolic(), trees[0].clone(), Space::l2box(6, 10.0)?];
    let mut worst_cat = f64::NEG_INFINITY;
    for (i, s) in spaces.iter().enumerate() {
        let mut sampler = PointSampler::for_stream(17, 10.0, i as u64);
        for _ in 0..100 {
            let (x, y, z) = (sampler.sample(s), sampler.sample(s), sampler.sample(s));
            worst_cat = worst_cat.max(cat_defect(s, &x, &y, &z, 16)?);
        }
    }

    let mut criterion_trees = true;
    for (i, t) in trees.iter().enumerate() {
        let mut sampler = PointSampler::for_stream(23, 20.0, i as u64);
        let triples: Vec<(Point, Point, Point)> = (0..40).map(|_| (sampler.sample(t), sampler.sample(t), sampler.sample(t))).collect();
        criterion_trees &= check_gromov_criterion(t, &triples, 0.0, 32)?.pass;
    }
    let e = Space::euclidean(2)?;
    let far = (Point::euclidean([0.0, 0.0]), Point::euclidean([100.0, 1.0]), Point::euclidean([100.0, -1.0]));
    let report = check_gromov_criterion(&e, &[far], 1.0, 64)?;
    let witness = report.worst().map(|w| (w.r, w.gromov_product, w.distance));
    let far_fails = !report.pass && witness.is_some();
    Ok((
        deltas_zero && worst_cat <= 1e-7 && criterion_trees && far_fails,
        format!(
            "tree deltas {deltas:?}; max cat defect {worst_cat:.2e}; tree criterion pass: {criterion_trees}; far triple fails with (r, (y|z)_x, d) = {witness:?}"
        ),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("l2 example reproduction", l2_example),
        ("promotion formula", promotion_formula),
        ("game-rule invariants", game_rule_sweep),
        ("r-tree dichotomy", rtree_dichotomy),
        ("man-wins pipeline", man_wins_pipeline),
        ("ray extraction", ray_extraction),
        ("directional construction", directional_construction),
        ("hyperbolicity suite", hyperbolicity_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += !pass as usize;
        println!("criterion {} [{}] {name}: {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
