//! Deterministic scenario simulation.
//!
//! A scenario lists ground-truth subject trajectories and floor markers.
//! The simulator inverts the camera model to synthesize detection frames for
//! front-sector points and emits motion/range pairs for side and back
//! points, feeds everything through fusion in timestamp order, and logs
//! ground truth next to each emitted event. Runs are pure functions of the
//! scenario and its seed: noise comes from a fixed portable generator
//! (ChaCha8) and the noiseless path never touches it, so identical seeds
//! give bit-identical logs.

use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{positive_finite, Error, Result};
use crate::eval::{summarize, Denominator, MeasurementPair, PercentErrorReport};
use crate::fusion::{FusionConfig, MotionEvent, RangeReading};
use crate::optics::{BoundingBox, CalibrationProfile, DetectionFrame, DEFAULT_SUBJECT_EXTENT_M};
use crate::pipeline::{InputEvent, Pipeline};
use crate::sector::Sector;
use crate::zones::ZoneAssessment;

/// Smallest range reading noise can produce; keeps noisy readings positive.
const MIN_RANGE_M: f64 = 1.0e-3;
/// Smallest synthesized bounding-box height; smaller boxes clamp and flag.
const MIN_BBOX_PX: f64 = 1.0;

fn default_extent() -> f64 {
    DEFAULT_SUBJECT_EXTENT_M
}

/// Camera description: the profile handed to fusion, plus an optional
/// distinct focal length used for pixel synthesis (to model a miscalibrated
/// device).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioCamera {
    pub camera_id: String,
    pub focal_length_px: f64,
    #[serde(default = "default_extent")]
    pub assumed_subject_extent_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_focal_length_px: Option<f64>,
}

impl ScenarioCamera {
    pub fn profile(&self) -> Result<CalibrationProfile> {
        CalibrationProfile::new(
            self.camera_id.clone(),
            self.focal_length_px,
            self.assumed_subject_extent_m,
        )
    }

    pub fn synth_focal_length_px(&self) -> f64 {
        self.true_focal_length_px.unwrap_or(self.focal_length_px)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryPoint {
    pub timestamp_ms: u64,
    pub sector: Sector,
    pub true_distance_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectSpec {
    pub subject_id: String,
    #[serde(default = "default_extent")]
    pub true_height_m: f64,
    pub trajectory: Vec<TrajectoryPoint>,
}

/// A labeled ground-truth distance. Markers pair with same-labeled subjects
/// during evaluation; a marker with no matching subject also stands in as a
/// camera target of the assumed extent at its distance (timestamp 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Marker {
    pub label: String,
    pub distance_m: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// Std dev of Gaussian pixel noise added to synthesized box heights.
    #[serde(default)]
    pub sigma_px: f64,
    /// Std dev of Gaussian noise added to ultrasonic readings, meters.
    #[serde(default)]
    pub sigma_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub camera: ScenarioCamera,
    #[serde(default)]
    pub subjects: Vec<SubjectSpec>,
    #[serde(default)]
    pub markers: Vec<Marker>,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Scenario::from_json_str(&text)
    }

    /// Checks every field constraint, reporting all violations together with
    /// their field paths.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        check_positive(&mut v, "camera.focal_length_px", self.camera.focal_length_px);
        check_positive(
            &mut v,
            "camera.assumed_subject_extent_m",
            self.camera.assumed_subject_extent_m,
        );
        if let Some(f) = self.camera.true_focal_length_px {
            check_positive(&mut v, "camera.true_focal_length_px", f);
        }
        check_non_negative(&mut v, "noise.sigma_px", self.noise.sigma_px);
        check_non_negative(&mut v, "noise.sigma_m", self.noise.sigma_m);

        let mut subject_ids = std::collections::HashSet::new();
        for (i, subject) in self.subjects.iter().enumerate() {
            if subject.subject_id.is_empty() {
                v.push(format!("subjects[{i}].subject_id: must not be empty"));
            }
            if !subject_ids.insert(subject.subject_id.as_str()) {
                v.push(format!(
                    "subjects[{i}].subject_id: duplicate `{}`",
                    subject.subject_id
                ));
            }
            check_positive(
                &mut v,
                &format!("subjects[{i}].true_height_m"),
                subject.true_height_m,
            );
            let mut last_t = None;
            for (j, point) in subject.trajectory.iter().enumerate() {
                check_positive(
                    &mut v,
                    &format!("subjects[{i}].trajectory[{j}].true_distance_m"),
                    point.true_distance_m,
                );
                if let Some(prev) = last_t {
                    if point.timestamp_ms < prev {
                        v.push(format!(
                            "subjects[{i}].trajectory[{j}].timestamp_ms: not timestamp-sorted ({} after {prev})",
                            point.timestamp_ms
                        ));
                    }
                }
                last_t = Some(point.timestamp_ms);
            }
        }

        let mut labels = std::collections::HashSet::new();
        for (k, marker) in self.markers.iter().enumerate() {
            if marker.label.is_empty() {
                v.push(format!("markers[{k}].label: must not be empty"));
            }
            if !labels.insert(marker.label.as_str()) {
                v.push(format!("markers[{k}].label: duplicate `{}`", marker.label));
            }
            check_positive(&mut v, &format!("markers[{k}].distance_m"), marker.distance_m);
        }

        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::validation(v))
        }
    }
}

fn check_positive(v: &mut Vec<String>, path: &str, value: f64) {
    if !(value.is_finite() && value > 0.0) {
        v.push(format!("{path}: expected a finite value > 0, got {value}"));
    }
}

fn check_non_negative(v: &mut Vec<String>, path: &str, value: f64) {
    if !(value.is_finite() && value >= 0.0) {
        v.push(format!("{path}: expected a finite value >= 0, got {value}"));
    }
}

/// Exact inverse of the range model: the pixel height a subject of
/// `true_height_m` shows at `true_distance_m`. No noise, no clamping.
pub fn synth_bbox_height(
    true_distance_m: f64,
    true_height_m: f64,
    focal_length_px: f64,
) -> Result<f64> {
    positive_finite("true_distance_m", true_distance_m)?;
    positive_finite("true_height_m", true_height_m)?;
    positive_finite("focal_length_px", focal_length_px)?;
    Ok(true_height_m * focal_length_px / true_distance_m)
}

/// What the simulator emitted for one trajectory point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LoggedEvent {
    Motion(MotionEvent),
    Range(RangeReading),
    Detection(BoundingBox),
}

/// Ground truth paired with one emitted event and its outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub timestamp_ms: u64,
    pub label: String,
    pub sector: Sector,
    pub true_distance_m: f64,
    pub event: LoggedEvent,
    pub assessment: Option<ZoneAssessment>,
    /// True when the synthesized box height hit the 1 px floor.
    pub bbox_clamped: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SimulationLog {
    pub entries: Vec<LogEntry>,
    pub dropped_unarmed: u64,
}

/// One ground-truth sidecar row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub t_ms: u64,
    pub label: String,
    pub sector: Sector,
    pub true_distance_m: f64,
}

impl SimulationLog {
    pub fn assessments(&self) -> Vec<ZoneAssessment> {
        self.entries
            .iter()
            .filter_map(|e| e.assessment.clone())
            .collect()
    }

    /// One truth row per trajectory point (range entries repeat their
    /// motion entry's truth, so they are skipped).
    pub fn ground_truth(&self) -> Vec<TruthRecord> {
        self.entries
            .iter()
            .filter(|e| !matches!(e.event, LoggedEvent::Range(_)))
            .map(|e| TruthRecord {
                t_ms: e.timestamp_ms,
                label: e.label.clone(),
                sector: e.sector,
                true_distance_m: e.true_distance_m,
            })
            .collect()
    }
}

struct PointSpec {
    timestamp_ms: u64,
    sector: Sector,
    label: String,
    true_height_m: f64,
    true_distance_m: f64,
}

enum Step {
    Motion {
        label: String,
        true_distance_m: f64,
        event: MotionEvent,
    },
    Range {
        label: String,
        true_distance_m: f64,
        reading: RangeReading,
    },
    Frame {
        frame: DetectionFrame,
        members: Vec<FrameMember>,
    },
}

struct FrameMember {
    label: String,
    true_distance_m: f64,
    clamped: bool,
}

impl Step {
    fn sort_key(&self) -> (u64, u8, Sector) {
        match self {
            Step::Motion { event, .. } => (event.timestamp_ms, 0, event.sector),
            Step::Range { reading, .. } => (reading.timestamp_ms, 1, reading.sector),
            Step::Frame { frame, .. } => (frame.timestamp_ms, 2, Sector::Front),
        }
    }
}

/// Runs the scenario end to end and returns the paired log. Pure in
/// (scenario, fusion config): repeated runs are identical byte for byte
/// once serialized.
pub fn run_scenario(scenario: &Scenario, fusion: &FusionConfig) -> Result<SimulationLog> {
    scenario.validate()?;
    let profile = scenario.camera.profile()?;
    let synth_focal = scenario.camera.synth_focal_length_px();

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let px_noise = noise_dist("noise.sigma_px", scenario.noise.sigma_px)?;
    let m_noise = noise_dist("noise.sigma_m", scenario.noise.sigma_m)?;

    // Trajectory points in declaration order; unmatched markers stand in as
    // fixed camera targets at t=0.
    let mut points: Vec<PointSpec> = Vec::new();
    for subject in &scenario.subjects {
        for tp in &subject.trajectory {
            points.push(PointSpec {
                timestamp_ms: tp.timestamp_ms,
                sector: tp.sector,
                label: subject.subject_id.clone(),
                true_height_m: subject.true_height_m,
                true_distance_m: tp.true_distance_m,
            });
        }
    }
    for marker in &scenario.markers {
        if scenario.subjects.iter().any(|s| s.subject_id == marker.label) {
            continue;
        }
        points.push(PointSpec {
            timestamp_ms: 0,
            sector: Sector::Front,
            label: marker.label.clone(),
            true_height_m: scenario.camera.assumed_subject_extent_m,
            true_distance_m: marker.distance_m,
        });
    }

    // Synthesis (and noise draws) happen in declaration order so the draw
    // sequence is independent of timestamp sorting.
    let mut steps: Vec<Step> = Vec::new();
    let mut front: Vec<(u64, FrameMember, BoundingBox)> = Vec::new();
    for point in &points {
        if point.sector == Sector::Front {
            let exact = synth_bbox_height(point.true_distance_m, point.true_height_m, synth_focal)?;
            let noisy = exact + draw(&mut rng, px_noise);
            let clamped = noisy < MIN_BBOX_PX;
            let height = noisy.max(MIN_BBOX_PX);
            let bbox = BoundingBox::new(0.0, 0.0, height * 0.5, height, 1.0, point.label.clone())?;
            front.push((
                point.timestamp_ms,
                FrameMember {
                    label: point.label.clone(),
                    true_distance_m: point.true_distance_m,
                    clamped,
                },
                bbox,
            ));
        } else {
            let noisy = (point.true_distance_m + draw(&mut rng, m_noise)).max(MIN_RANGE_M);
            let reading = if noisy <= fusion.max_range_m {
                RangeReading::new(point.timestamp_ms, point.sector, noisy)?
            } else {
                RangeReading::out_of_range(point.timestamp_ms, point.sector)?
            };
            steps.push(Step::Motion {
                label: point.label.clone(),
                true_distance_m: point.true_distance_m,
                event: MotionEvent::new(point.timestamp_ms, point.sector)?,
            });
            steps.push(Step::Range {
                label: point.label.clone(),
                true_distance_m: point.true_distance_m,
                reading,
            });
        }
    }

    // Front points sharing a timestamp form one detection frame.
    front.sort_by_key(|(t, _, _)| *t);
    let mut members: Vec<FrameMember> = Vec::new();
    let mut boxes: Vec<BoundingBox> = Vec::new();
    let mut frame_t: Option<u64> = None;
    for (t, member, bbox) in front {
        if frame_t != Some(t) {
            if let Some(prev) = frame_t {
                steps.push(Step::Frame {
                    frame: DetectionFrame::new(prev, std::mem::take(&mut boxes))?,
                    members: std::mem::take(&mut members),
                });
            }
            frame_t = Some(t);
        }
        members.push(member);
        boxes.push(bbox);
    }
    if let Some(t) = frame_t {
        steps.push(Step::Frame {
            frame: DetectionFrame::new(t, boxes)?,
            members,
        });
    }

    steps.sort_by_key(Step::sort_key);

    let mut pipeline = Pipeline::new(fusion.clone(), profile);
    let mut entries: Vec<LogEntry> = Vec::new();
    for step in steps {
        match step {
            Step::Motion {
                label,
                true_distance_m,
                event,
            } => {
                pipeline.apply(&InputEvent::Motion(event.clone()))?;
                entries.push(LogEntry {
                    timestamp_ms: event.timestamp_ms,
                    label,
                    sector: event.sector,
                    true_distance_m,
                    event: LoggedEvent::Motion(event),
                    assessment: None,
                    bbox_clamped: false,
                });
            }
            Step::Range {
                label,
                true_distance_m,
                reading,
            } => {
                let out = pipeline.apply(&InputEvent::Range(reading.clone()))?;
                entries.push(LogEntry {
                    timestamp_ms: reading.timestamp_ms,
                    label,
                    sector: reading.sector,
                    true_distance_m,
                    event: LoggedEvent::Range(reading),
                    assessment: out.assessments.into_iter().next(),
                    bbox_clamped: false,
                });
            }
            Step::Frame { frame, members } => {
                let out = pipeline.apply(&InputEvent::Frame(frame.clone()))?;
                for (member, bbox) in members.into_iter().zip(frame.boxes.iter()) {
                    let assessment = out
                        .assessments
                        .iter()
                        .find(|a| a.subject_id.as_deref() == Some(member.label.as_str()))
                        .cloned();
                    entries.push(LogEntry {
                        timestamp_ms: frame.timestamp_ms,
                        label: member.label,
                        sector: Sector::Front,
                        true_distance_m: member.true_distance_m,
                        event: LoggedEvent::Detection(bbox.clone()),
                        assessment,
                        bbox_clamped: member.clamped,
                    });
                }
            }
        }
    }

    Ok(SimulationLog {
        entries,
        dropped_unarmed: pipeline.state().dropped_unarmed(),
    })
}

fn noise_dist(param: &'static str, sigma: f64) -> Result<Option<Normal<f64>>> {
    if sigma == 0.0 {
        return Ok(None);
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid_argument(
            param,
            format!("expected a finite value >= 0, got {sigma}"),
        ));
    }
    Ok(Some(Normal::new(0.0, sigma).expect("validated sigma")))
}

fn draw(rng: &mut ChaCha8Rng, dist: Option<Normal<f64>>) -> f64 {
    match dist {
        Some(d) => d.sample(rng),
        None => 0.0,
    }
}

/// Pairs every assessed distance in the log with its ground truth: a marker
/// with the subject's label wins, otherwise the trajectory's own distance.
pub fn distance_pairs(log: &SimulationLog, markers: &[Marker]) -> Vec<MeasurementPair> {
    log.entries
        .iter()
        .filter_map(|entry| {
            let detected = entry.assessment.as_ref()?.distance_m?;
            let actual = markers
                .iter()
                .find(|m| m.label == entry.label)
                .map(|m| m.distance_m)
                .unwrap_or(entry.true_distance_m);
            Some(MeasurementPair::new(entry.label.clone(), detected, actual))
        })
        .collect()
}

/// Detected-vs-actual report over a finished run.
pub fn evaluate_log(
    log: &SimulationLog,
    markers: &[Marker],
    denominator: Denominator,
) -> Result<PercentErrorReport> {
    summarize(denominator, &distance_pairs(log, markers))
}
