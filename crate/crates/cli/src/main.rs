//! `raylab` command-line front end.
//!
//! Exit status: 0 when every requested certificate passed, 1 when one
//! failed, 2 on invalid input or usage, 3 when a man strategy faulted.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "raylab", version, about = "Geodesic rays, hyperbolicity diagnostics and the Lion-Man game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one game and write its transcript.
    Simulate(SimulateArgs),
    /// Angle sequence, man-wins curve certificate and tree audit of a transcript.
    Analyze(AnalyzeArgs),
    /// Grid check that a curve is a (k-local) (λ,ε)-quasi-geodesic.
    VerifyCurve(VerifyCurveArgs),
    /// Approximate a geodesic ray from a quasi-geodesic or directional sequence.
    ExtractRay(ExtractRayArgs),
    /// Estimate the slimness constant δ from random triangles.
    EstimateDelta(EstimateDeltaArgs),
    /// Quasi-geodesic check of the ℓ₂ staircase example.
    DemoL2(DemoL2Args),
    /// Strategy battery over seeded start configurations.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum ManKind {
    Stationary,
    Greedy,
    Random,
    Directional,
}

#[derive(Args)]
pub(crate) struct GameFlags {
    /// Step size D (overrides the config file).
    #[arg(long = "D")]
    pub d: Option<f64>,
    /// Step budget N (overrides the config file).
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Capture tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub(crate) struct SimulateArgs {
    /// Space/domain/game TOML file.
    #[arg(long, visible_alias = "config")]
    pub space: PathBuf,
    #[arg(long, value_enum)]
    pub man: ManKind,
    /// Candidate directions for the greedy man.
    #[arg(long, default_value_t = 16)]
    pub directions: usize,
    /// Curve JSON followed by the directional man.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Lion start as a JSON point, e.g. '{"euclidean":[0,0]}'.
    #[arg(long)]
    pub lion: Option<String>,
    /// Man start as a JSON point.
    #[arg(long)]
    pub man_start: Option<String>,
    #[command(flatten)]
    pub game: GameFlags,
    /// Transcript output path.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// CSV of `n,D_n`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct AnalyzeArgs {
    #[arg(long)]
    pub transcript: PathBuf,
    /// Locality k for the man-wins curve certificate; omit to skip it.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 300)]
    pub grid: usize,
    /// JSON report output path.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// CSV of `n,beta,alpha`.
    #[arg(long)]
    pub beta_csv: Option<PathBuf>,
    /// CSV of tree audit residuals.
    #[arg(long)]
    pub audit_csv: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct VerifyCurveArgs {
    #[arg(long)]
    pub curve: PathBuf,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Only test pairs with |s−t| ≤ k.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 500)]
    pub grid: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub witness_csv: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct ExtractRayArgs {
    /// Curve JSON; treated as a quasi-geodesic unless --directional is set.
    #[arg(long, conflicts_with = "transcript")]
    pub curve: Option<PathBuf>,
    /// Transcript whose lion positions form the directional sequence.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Use the curve's sample points as a directional sequence.
    #[arg(long)]
    pub directional: bool,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Slimness constant of the space, used for the convergence bounds.
    #[arg(long, default_value_t = 0.0)]
    pub delta_star: f64,
    /// Directional slack b.
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    #[arg(long, default_value_t = 10)]
    pub k_max: u32,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// CSV of `k,distance_from_base,last_residual,stop`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct EstimateDeltaArgs {
    #[arg(long, visible_alias = "config")]
    pub space: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
}

#[derive(Args)]
pub(crate) struct DemoL2Args {
    #[arg(long, default_value_t = 6)]
    pub dim: usize,
    #[arg(long, default_value_t = 10.0)]
    pub base: f64,
    #[arg(long, default_value_t = 500)]
    pub grid: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub witness_csv: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct SweepArgs {
    #[arg(long, visible_alias = "config")]
    pub space: PathBuf,
    #[arg(long = "D", default_value_t = 1.0)]
    pub d: f64,
    #[arg(long = "N", default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Start configurations per strategy.
    #[arg(long, default_value_t = 4)]
    pub runs: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10.0)]
    pub scale: f64,
    /// Locality for curve certificates (default 12·D).
    #[arg(long)]
    pub k: Option<f64>,
    /// Curve JSON followed by the directional man.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::VerifyCurve(a) => commands::verify_curve(a),
        Command::ExtractRay(a) => commands::extract_ray(a),
        Command::EstimateDelta(a) => commands::estimate_delta(a),
        Command::DemoL2(a) => commands::demo_l2(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(commands::Verdict::Pass) => ExitCode::SUCCESS,
        Ok(commands::Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
