//! Monocular ranging by triangle similarity.
//!
//! A camera is calibrated once against a subject of known size at a known
//! distance; afterwards the apparent pixel height of a detected subject maps
//! straight to a distance estimate. All geometry is carried in meters and
//! double precision; imperial units appear only at presentation boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{in_range, positive_finite, Error, Result};

/// Default assumed subject height in meters (5 ft 4 in).
pub const DEFAULT_SUBJECT_EXTENT_M: f64 = 1.6256;

pub const METERS_PER_INCH: f64 = 0.0254;

pub fn meters_to_inches(meters: f64) -> f64 {
    meters / METERS_PER_INCH
}

pub fn inches_to_meters(inches: f64) -> f64 {
    inches * METERS_PER_INCH
}

/// Camera model: focal length in pixels plus the real-world subject extent
/// assumed when converting apparent size to distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationProfile {
    pub camera_id: String,
    pub focal_length_px: f64,
    pub assumed_subject_extent_m: f64,
}

impl CalibrationProfile {
    pub fn new(
        camera_id: impl Into<String>,
        focal_length_px: f64,
        assumed_subject_extent_m: f64,
    ) -> Result<Self> {
        positive_finite("focal_length_px", focal_length_px)?;
        positive_finite("assumed_subject_extent_m", assumed_subject_extent_m)?;
        Ok(CalibrationProfile {
            camera_id: camera_id.into(),
            focal_length_px,
            assumed_subject_extent_m,
        })
    }

    pub fn with_default_extent(camera_id: impl Into<String>, focal_length_px: f64) -> Result<Self> {
        CalibrationProfile::new(camera_id, focal_length_px, DEFAULT_SUBJECT_EXTENT_M)
    }

    /// Serializes to a flat `key=value` text file, one key per line.
    pub fn to_key_values(&self) -> String {
        format!(
            "camera_id={}\nfocal_length_px={:?}\nassumed_subject_extent_m={:?}\n",
            self.camera_id, self.focal_length_px, self.assumed_subject_extent_m
        )
    }

    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut camera_id = None;
        let mut focal = None;
        let mut extent = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected key=value, got `{line}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "camera_id" => camera_id = Some(value.to_string()),
                "focal_length_px" => focal = Some(parse_float(idx + 1, key, value)?),
                "assumed_subject_extent_m" => extent = Some(parse_float(idx + 1, key, value)?),
                other => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let focal = focal.ok_or_else(|| missing("focal_length_px"))?;
        let extent = extent.unwrap_or(DEFAULT_SUBJECT_EXTENT_M);
        CalibrationProfile::new(camera_id.unwrap_or_default(), focal, extent)
    }
}

fn parse_float(line: usize, key: &str, value: &str) -> Result<f64> {
    value.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("key `{key}`: expected a decimal number, got `{value}`"),
    })
}

fn missing(key: &str) -> Error {
    Error::Parse {
        line: 0,
        message: format!("missing required key `{key}`"),
    }
}

/// A pixel-space detection of one subject.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub width_px: f64,
    pub height_px: f64,
    pub confidence: f64,
    pub subject_id: String,
}

impl BoundingBox {
    pub fn new(
        x: f64,
        y: f64,
        width_px: f64,
        height_px: f64,
        confidence: f64,
        subject_id: impl Into<String>,
    ) -> Result<Self> {
        positive_finite("width_px", width_px)?;
        positive_finite("height_px", height_px)?;
        in_range("confidence", confidence, 0.0, 1.0)?;
        Ok(BoundingBox {
            x,
            y,
            width_px,
            height_px,
            confidence,
            subject_id: subject_id.into(),
        })
    }
}

/// All subjects detected in a single camera frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionFrame {
    pub timestamp_ms: u64,
    pub boxes: Vec<BoundingBox>,
}

impl DetectionFrame {
    pub fn new(timestamp_ms: u64, boxes: Vec<BoundingBox>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for b in &boxes {
            if !seen.insert(b.subject_id.as_str()) {
                return Err(Error::invalid_argument(
                    "boxes",
                    format!("duplicate subject_id `{}` within one frame", b.subject_id),
                ));
            }
        }
        Ok(DetectionFrame {
            timestamp_ms,
            boxes,
        })
    }
}

/// Computes the focal length (pixels) from one sighting of a subject whose
/// real extent and distance are both known.
pub fn calibrate_focal_length(
    pixel_extent_px: f64,
    known_distance_m: f64,
    known_extent_m: f64,
) -> Result<f64> {
    positive_finite("pixel_extent_px", pixel_extent_px)?;
    positive_finite("known_distance_m", known_distance_m)?;
    positive_finite("known_extent_m", known_extent_m)?;
    Ok(pixel_extent_px * known_distance_m / known_extent_m)
}

/// Estimates subject distance (meters) from the apparent bounding-box height.
pub fn estimate_distance(profile: &CalibrationProfile, bbox_height_px: f64) -> Result<f64> {
    positive_finite("bbox_height_px", bbox_height_px)?;
    Ok(profile.assumed_subject_extent_m * profile.focal_length_px / bbox_height_px)
}

/// Inverts the range model: given a known distance, recovers the subject's
/// real-world extent from its apparent pixel height.
pub fn estimate_subject_extent(
    known_distance_m: f64,
    bbox_height_px: f64,
    focal_length_px: f64,
) -> Result<f64> {
    positive_finite("known_distance_m", known_distance_m)?;
    positive_finite("bbox_height_px", bbox_height_px)?;
    positive_finite("focal_length_px", focal_length_px)?;
    Ok(known_distance_m * bbox_height_px / focal_length_px)
}
