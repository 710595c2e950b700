use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use raylab::game::{man_scripted_strategy, run_game, GameConfig, Transcript};
use raylab::space::{DomainSpec, Point, SpaceSpec};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn raylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raylab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn greedy_man_on_tripod_is_caught() {
    let o = raylab(&["simulate", "--space", p(&fixture("tripod.toml")), "--man", "greedy", "--D", "1", "--N", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("outcome: lion-wins-physical"), "{}", stdout(&o));
}

#[test]
fn random_man_without_seed_is_a_usage_error() {
    let o = raylab(&["simulate", "--space", p(&fixture("tripod.toml")), "--man", "random"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn stationary_segment_rows_end_at_capture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = raylab(&["simulate", "--space", p(&fixture("segment.toml")), "--man", "stationary", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("capture_step=9 steps=10"));
    let text = fs::read_to_string(&out).unwrap();
    let t = Transcript::from_json_str(&text).unwrap();
    assert_eq!(t.steps.len(), 10);
    assert_eq!(t.to_json_string(), text);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("t{i}.json"));
            let csv = dir.path().join(format!("t{i}.csv"));
            let o = raylab(&[
                "simulate", "--space", p(&fixture("disk.toml")), "--man", "random", "--seed", "11", "--N", "300", "-o", p(&out), "--csv", p(&csv),
            ]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            (fs::read(&out).unwrap(), fs::read(&csv).unwrap())
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn disk_greedy_is_a_limit_win() {
    let o = raylab(&["simulate", "--space", p(&fixture("disk.toml")), "--man", "greedy"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("outcome: lion-wins-limit"), "{}", stdout(&o));
}

fn ray_transcript(dir: &Path) -> PathBuf {
    let out = dir.join("ray.json");
    let o = raylab(&["simulate", "--space", p(&fixture("ray_tree.toml")), "--man", "directional", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("man-wins-observed"));
    out
}

#[test]
fn analyze_man_wins_tree_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let t = ray_transcript(dir.path());
    let beta = dir.path().join("beta.csv");
    let audit = dir.path().join("audit.csv");
    let report = dir.path().join("report.json");
    let o = raylab(&[
        "analyze", "--transcript", p(&t), "--k", "12", "--beta-csv", p(&beta), "--audit-csv", p(&audit), "-o", p(&report),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("curve: PASS n_k=1"), "{s}");
    assert!(s.contains("audit: PASS exact=true"), "{s}");
    assert!(s.contains("final_distance=500"), "{s}");
    assert!(fs::read_to_string(&beta).unwrap().starts_with("n,beta,alpha\n1,"));
    assert_eq!(fs::read_to_string(&audit).unwrap().lines().count(), 501);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["curve"]["n_k"], 1);
}

#[test]
fn analyze_captured_transcript_reports_capture() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let o = raylab(&["simulate", "--space", p(&fixture("tripod.toml")), "--man", "stationary", "-o", p(&t)]);
    assert_eq!(o.status.code(), Some(0));
    let o = raylab(&["analyze", "--transcript", p(&t)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("audit: PASS exact=true capture_step=6"), "{}", stdout(&o));
    let o = raylab(&["analyze", "--transcript", p(&t), "--k", "12"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_threshold_not_met() {
    // The man runs straight along the x-axis, then sidesteps on the last move.
    let mut moves: Vec<Point> = (1..20).map(|n| Point::euclidean([5.0 + n as f64, 0.0])).collect();
    moves.push(Point::euclidean([24.0, 1.0]));
    let cfg = GameConfig {
        space: SpaceSpec::Euclidean { dim: 2 },
        domain: DomainSpec::Whole,
        d: 1.0,
        max_steps: 21,
        tol: 1e-9,
        lion_start: Point::euclidean([0.0, 0.0]),
        man_start: Point::euclidean([5.0, 0.0]),
        seed: None,
    };
    let t = run_game(&cfg, &mut man_scripted_strategy(moves)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    fs::write(&path, t.to_json_string()).unwrap();
    let o = raylab(&["analyze", "--transcript", p(&path), "--k", "1000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("curve: FAIL angle threshold"), "{}", stdout(&o));
    let o = raylab(&["analyze", "--transcript", p(&path), "--k", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_curve_verdicts() {
    let o = raylab(&["verify-curve", "--curve", p(&fixture("geodesic_curve.json")), "--lambda", "1", "--epsilon", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("PASS"));
    let dir = tempfile::tempdir().unwrap();
    let bent = dir.path().join("bent.json");
    fs::write(
        &bent,
        r#"{"space":{"kind":"euclidean","dim":2},"samples":[
            {"t":0,"point":{"euclidean":[0,0]}},{"t":1,"point":{"euclidean":[1,0]}},{"t":2,"point":{"euclidean":[1,1]}}]}"#,
    )
    .unwrap();
    let csv = dir.path().join("w.csv");
    let o = raylab(&["verify-curve", "--curve", p(&bent), "--lambda", "1", "--witness-csv", p(&csv)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness bound=lower"));
    assert!(fs::read_to_string(&csv).unwrap().contains("first-violation,lower"));
    let o = raylab(&["verify-curve", "--curve", p(&bent), "--lambda", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn demo_l2_passes_and_shows_the_geodesic_failure() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("w.csv");
    let o = raylab(&["demo-l2", "--witness-csv", p(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert!(lines[0].starts_with("PASS lambda=1.914854215512676"), "{}", lines[0]);
    assert!(lines[1].starts_with("FAIL lambda=1 "), "{}", lines[1]);
    assert!(lines[1].contains("s=0 t=110"));
    assert!(fs::read_to_string(&csv).unwrap().contains("first-violation,lower,0,110,"));
}

#[test]
fn estimate_delta_on_tripod_is_zero() {
    let o = raylab(&["estimate-delta", "--space", p(&fixture("tripod.toml")), "--trials", "50", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "space=rtree trials=50 seed=3 delta=0");
}

#[test]
fn extract_ray_from_lion_path() {
    let dir = tempfile::tempdir().unwrap();
    let t = ray_transcript(dir.path());
    let csv = dir.path().join("ray.csv");
    let o = raylab(&["extract-ray", "--transcript", p(&t), "--b", "0", "--k-max", "10", "--csv", p(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("max_residual=0 "), "{}", stdout(&o));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 11);
    let o = raylab(&["extract-ray", "--b", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("s{i}.json"));
            let o = raylab(&["sweep", "--space", p(&fixture("ray_tree.toml")), "--seed", "1", "--N", "200", "-o", p(&out)]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            assert!(stdout(&o).contains("directional run=0 outcome=man-wins-observed"));
            fs::read(&out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn malformed_config_points_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[space]\nkind = \"rtree\"\nvertices = \n").unwrap();
    let o = raylab(&["simulate", "--space", p(&cfg), "--man", "stationary"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn strategy_fault_has_its_own_exit_code() {
    // The directional curve leaves the disk after a few moves.
    let o = raylab(&[
        "simulate", "--space", p(&fixture("disk.toml")), "--man", "directional", "--curve", p(&fixture("geodesic_curve.json")),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("strategy"), "{}", stderr(&o));
}
