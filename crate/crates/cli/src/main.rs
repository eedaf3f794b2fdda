//! Command-line front-end for the proximeter sensing pipeline.
//!
//! Exit codes: 0 success, 1 some input lines skipped, 2 usage error,
//! 3 validation error, 4 I/O error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::ExitError;

#[derive(Parser)]
#[command(name = "proximeter", version, about = "Wearable proximity sensing tools")]
struct Cli {
    /// Path to a key=value config file; defaults apply when absent.
    #[arg(long, global = true, env = "PROXIMETER_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Compute a camera's focal length from one known-distance sighting.
    Calibrate(CalibrateArgs),
    /// Run a scenario file through the full pipeline.
    Simulate(SimulateArgs),
    /// Classify one distance per stdin line into zone tags.
    Classify,
    /// Percent-error report over a detected/actual pairs CSV.
    Evaluate(EvaluateArgs),
    /// Replay recorded sensor streams into an event log.
    Replay(ReplayArgs),
    /// Recover a subject's real-world extent from a known distance.
    Extent(ExtentArgs),
}

#[derive(Args)]
struct CalibrateArgs {
    /// Apparent height of the calibration subject, pixels.
    #[arg(long)]
    pixel_extent: f64,
    /// Distance of the calibration subject from the camera, meters.
    #[arg(long)]
    known_distance: f64,
    /// Real-world height of the calibration subject, meters.
    #[arg(long)]
    known_extent: f64,
    #[arg(long, default_value = "default")]
    camera_id: String,
    /// Subject extent assumed at estimation time; config value when omitted.
    #[arg(long)]
    assumed_extent: Option<f64>,
    /// Where to write the calibration profile.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for events.jsonl, truth.jsonl, and report.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// CSV with detected and actual columns (label optional).
    #[arg(long)]
    pairs: PathBuf,
    /// Also write the report as CSV.
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// detections.jsonl stream; requires --profile.
    #[arg(long)]
    detections: Option<PathBuf>,
    /// motions.jsonl stream.
    #[arg(long)]
    motions: Option<PathBuf>,
    /// ranges.jsonl stream.
    #[arg(long)]
    ranges: Option<PathBuf>,
    /// Calibration profile for ranging detections.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Output events.jsonl path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExtentArgs {
    /// Known distance to the subject, meters.
    #[arg(long)]
    known_distance: f64,
    /// Apparent bounding-box height, pixels.
    #[arg(long)]
    bbox_height: f64,
    /// Calibrated focal length, pixels.
    #[arg(long)]
    focal_length: f64,
    /// Print inches (2 decimals) instead of meters.
    #[arg(long)]
    inches: bool,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message);
            err.code
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, ExitError> {
    let config = commands::load_config(cli.config.as_deref())?;
    match cli.command {
        Commands::Calibrate(args) => commands::calibrate(&config, &args),
        Commands::Simulate(args) => commands::simulate(&config, &args),
        Commands::Classify => commands::classify(&config),
        Commands::Evaluate(args) => commands::evaluate(&config, &args),
        Commands::Replay(args) => commands::replay(&config, &args),
        Commands::Extent(args) => commands::extent(&args),
    }
}
