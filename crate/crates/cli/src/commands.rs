use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use proximeter_core::error::Error;
use proximeter_core::eval::{summarize, MeasurementPair};
use proximeter_core::jsonl::{
    events_to_jsonl, read_jsonl, write_jsonl, DetectionRecord, MotionRecord, RangeRecord,
};
use proximeter_core::optics::{
    calibrate_focal_length, estimate_subject_extent, meters_to_inches, CalibrationProfile,
};
use proximeter_core::sim::{evaluate_log, run_scenario, Scenario};
use proximeter_core::{Config, Pipeline};

use crate::{CalibrateArgs, EvaluateArgs, ExtentArgs, ReplayArgs, SimulateArgs};

/// Failure with its process exit code. 2 usage, 3 validation, 4 I/O.
#[derive(Debug)]
pub struct ExitError {
    pub code: i32,
    pub message: String,
}

impl ExitError {
    pub fn usage(message: impl ToString) -> Self {
        ExitError {
            code: 2,
            message: message.to_string(),
        }
    }

    pub fn validation(message: impl ToString) -> Self {
        ExitError {
            code: 3,
            message: message.to_string(),
        }
    }

    pub fn io(message: impl ToString) -> Self {
        ExitError {
            code: 4,
            message: message.to_string(),
        }
    }
}

/// Maps errors arising from file contents: I/O keeps its own exit code,
/// everything else is a validation failure.
fn data_error(err: Error) -> ExitError {
    match err {
        Error::Io(io) => ExitError::io(io),
        other => ExitError::validation(other),
    }
}

fn io_at(path: &Path, err: std::io::Error) -> ExitError {
    ExitError::io(format!("{}: {err}", path.display()))
}

pub fn load_config(path: Option<&Path>) -> Result<Config, ExitError> {
    match path {
        None => Ok(Config::default()),
        Some(p) => Config::from_file(p).map_err(|e| match e {
            Error::Io(io) => io_at(p, io),
            other => ExitError::validation(format!("{}: {other}", p.display())),
        }),
    }
}

pub fn calibrate(config: &Config, args: &CalibrateArgs) -> Result<i32, ExitError> {
    let focal = calibrate_focal_length(args.pixel_extent, args.known_distance, args.known_extent)
        .map_err(ExitError::usage)?;
    let extent = args
        .assumed_extent
        .unwrap_or(config.assumed_subject_extent_m);
    let profile =
        CalibrationProfile::new(&args.camera_id, focal, extent).map_err(ExitError::usage)?;
    fs::write(&args.out, profile.to_key_values()).map_err(|e| io_at(&args.out, e))?;
    println!("{focal:?}");
    Ok(0)
}

pub fn simulate(config: &Config, args: &SimulateArgs) -> Result<i32, ExitError> {
    let mut scenario = Scenario::from_file(&args.scenario).map_err(data_error)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let fusion = config.fusion_config().map_err(data_error)?;
    let log = run_scenario(&scenario, &fusion).map_err(data_error)?;

    fs::create_dir_all(&args.out_dir).map_err(|e| io_at(&args.out_dir, e))?;
    let events_path = args.out_dir.join("events.jsonl");
    let events = events_to_jsonl(&log.assessments()).map_err(data_error)?;
    fs::write(&events_path, events).map_err(|e| io_at(&events_path, e))?;

    let truth_path = args.out_dir.join("truth.jsonl");
    let mut truth_buf = Vec::new();
    write_jsonl(&mut truth_buf, &log.ground_truth()).map_err(data_error)?;
    fs::write(&truth_path, truth_buf).map_err(|e| io_at(&truth_path, e))?;

    let report = evaluate_log(&log, &scenario.markers, config.denominator).map_err(data_error)?;
    let report_path = args.out_dir.join("report.csv");
    fs::write(&report_path, report.to_csv()).map_err(|e| io_at(&report_path, e))?;
    print!("{}", report.to_text_table());
    Ok(0)
}

pub fn classify(config: &Config) -> Result<i32, ExitError> {
    let bands = config.zone_bands().map_err(data_error)?;
    let stdin = std::io::stdin().lock();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut skipped = 0usize;
    for (idx, line) in stdin.lines().enumerate() {
        let line = line.map_err(ExitError::io)?;
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let verdict = token
            .parse::<f64>()
            .map_err(|_| format!("expected a decimal distance, got `{token}`"))
            .and_then(|d| bands.classify(d).map_err(|e| e.to_string()));
        match verdict {
            Ok(tag) => {
                let color = &config.colors.color(tag).name;
                writeln!(out, "{token}\t{tag}\t{color}").map_err(ExitError::io)?;
            }
            Err(reason) => {
                eprintln!("line {}: {reason}", idx + 1);
                skipped += 1;
            }
        }
    }
    Ok(if skipped > 0 { 1 } else { 0 })
}

pub fn evaluate(config: &Config, args: &EvaluateArgs) -> Result<i32, ExitError> {
    let text = fs::read_to_string(&args.pairs).map_err(|e| io_at(&args.pairs, e))?;
    let pairs = parse_pairs_csv(&text)
        .map_err(|reason| ExitError::validation(format!("{}: {reason}", args.pairs.display())))?;
    let report = summarize(config.denominator, &pairs).map_err(data_error)?;
    if let Some(path) = &args.csv_out {
        fs::write(path, report.to_csv()).map_err(|e| io_at(path, e))?;
    }
    print!("{}", report.to_text_table());
    Ok(0)
}

/// Accepts header names detected/detected_m and actual/actual_m; a label
/// column is optional (row numbers otherwise). An empty file is an empty
/// pair list.
fn parse_pairs_csv(text: &str) -> Result<Vec<MeasurementPair>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let position =
        |names: [&str; 2]| headers.iter().position(|h| h == names[0] || h == names[1]);
    let detected_col =
        position(["detected", "detected_m"]).ok_or("missing `detected` column")?;
    let actual_col = position(["actual", "actual_m"]).ok_or("missing `actual` column")?;
    let label_col = headers.iter().position(|h| h == "label");

    let mut pairs = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let number = |col: usize, name: &str| {
            row.get(col)
                .ok_or_else(|| format!("row {}: missing `{name}` field", idx + 1))?
                .parse::<f64>()
                .map_err(|_| {
                    format!(
                        "row {}: `{name}` is not a decimal number: `{}`",
                        idx + 1,
                        row.get(col).unwrap_or_default()
                    )
                })
        };
        let label = label_col
            .and_then(|c| row.get(c))
            .map(str::to_string)
            .unwrap_or_else(|| (idx + 1).to_string());
        pairs.push(MeasurementPair::new(
            label,
            number(detected_col, "detected")?,
            number(actual_col, "actual")?,
        ));
    }
    Ok(pairs)
}

pub fn replay(config: &Config, args: &ReplayArgs) -> Result<i32, ExitError> {
    let detections: Vec<DetectionRecord> = read_stream(args.detections.as_deref())?;
    let motions: Vec<MotionRecord> = read_stream(args.motions.as_deref())?;
    let ranges: Vec<RangeRecord> = read_stream(args.ranges.as_deref())?;

    let profile = match (&args.profile, detections.is_empty()) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| io_at(path, e))?;
            CalibrationProfile::from_key_values(&text)
                .map_err(|e| ExitError::validation(format!("{}: {e}", path.display())))?
        }
        (None, false) => {
            return Err(ExitError::usage(
                "--profile is required when replaying detections",
            ))
        }
        (None, true) => CalibrationProfile::new("unused", 1.0, 1.0).map_err(data_error)?,
    };

    let events = proximeter_core::jsonl::merge_streams(&detections, &motions, &ranges)
        .map_err(data_error)?;
    let mut pipeline = Pipeline::new(config.fusion_config().map_err(data_error)?, profile);
    let assessments = pipeline.run(&events).map_err(data_error)?;
    let jsonl = events_to_jsonl(&assessments).map_err(data_error)?;
    match &args.out {
        Some(path) => fs::write(path, jsonl).map_err(|e| io_at(path, e))?,
        None => print!("{jsonl}"),
    }
    let dropped = pipeline.state().dropped_unarmed();
    if dropped > 0 {
        eprintln!("dropped {dropped} range reading(s) on unarmed sectors");
    }
    Ok(0)
}

fn read_stream<T: serde::de::DeserializeOwned>(
    path: Option<&Path>,
) -> Result<Vec<T>, ExitError> {
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    let file = fs::File::open(path).map_err(|e| io_at(path, e))?;
    read_jsonl(BufReader::new(file)).map_err(|e| match e {
        Error::Io(io) => io_at(path, io),
        other => ExitError::validation(format!("{}: {other}", path.display())),
    })
}

pub fn extent(args: &ExtentArgs) -> Result<i32, ExitError> {
    let extent_m =
        estimate_subject_extent(args.known_distance, args.bbox_height, args.focal_length)
            .map_err(ExitError::usage)?;
    if args.inches {
        println!("{:.2}", meters_to_inches(extent_m));
    } else {
        println!("{extent_m:?}");
    }
    Ok(0)
}
