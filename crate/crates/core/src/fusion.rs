//! Motion-gated sensor fusion.
//!
//! Side and back sectors are ranged on demand: a motion event arms the
//! sector's ultrasonic ranger, the next range reading on that sector consumes
//! the arming and becomes a `ZoneAssessment`, and unarmed readings are
//! dropped. Front-sector assessments come straight from camera detection
//! frames. Every assessment carries an expiry deadline after which `tick`
//! reverts the sector to idle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{positive_finite, Error, Result};
use crate::optics::{estimate_distance, BoundingBox, CalibrationProfile, DetectionFrame};
use crate::sector::Sector;
use crate::zones::{
    most_severe_tag, render_overlay, ColorScheme, FrontSubject, OverlayFrame, ZoneAssessment,
    ZoneBands, ZoneTag,
};

pub const DEFAULT_HOLD_MS: u64 = 2000;
pub const DEFAULT_MAX_RANGE_M: f64 = 4.0;
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.5;

/// A motion trigger on an ultrasonic sector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotionEvent {
    pub timestamp_ms: u64,
    pub sector: Sector,
}

impl MotionEvent {
    pub fn new(timestamp_ms: u64, sector: Sector) -> Result<Self> {
        ensure_ultrasonic(sector)?;
        Ok(MotionEvent {
            timestamp_ms,
            sector,
        })
    }
}

/// One ultrasonic measurement. `distance_m: None` means the ranger saw
/// nothing inside its ceiling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeReading {
    pub timestamp_ms: u64,
    pub sector: Sector,
    pub distance_m: Option<f64>,
}

impl RangeReading {
    pub fn new(timestamp_ms: u64, sector: Sector, distance_m: f64) -> Result<Self> {
        ensure_ultrasonic(sector)?;
        positive_finite("distance_m", distance_m)?;
        Ok(RangeReading {
            timestamp_ms,
            sector,
            distance_m: Some(distance_m),
        })
    }

    pub fn out_of_range(timestamp_ms: u64, sector: Sector) -> Result<Self> {
        ensure_ultrasonic(sector)?;
        Ok(RangeReading {
            timestamp_ms,
            sector,
            distance_m: None,
        })
    }
}

fn ensure_ultrasonic(sector: Sector) -> Result<()> {
    if sector.is_ultrasonic() {
        Ok(())
    } else {
        Err(Error::invalid_argument(
            "sector",
            "front sector is camera-ranged; motion/range events cover left, right, and back only",
        ))
    }
}

/// Instruction for the sensor layer (real or simulated).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    ActivateUltrasonic(Sector),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusionConfig {
    pub bands: ZoneBands,
    pub colors: ColorScheme,
    /// How long an assessment stays on the display before reverting to idle.
    pub hold_ms: u64,
    /// Ultrasonic ceiling; finite readings beyond it count as out-of-range.
    pub max_range_m: f64,
    /// Detection boxes below this confidence are ignored.
    pub min_confidence: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            bands: ZoneBands::default(),
            colors: ColorScheme::default(),
            hold_ms: DEFAULT_HOLD_MS,
            max_range_m: DEFAULT_MAX_RANGE_M,
            min_confidence: DEFAULT_MIN_CONFIDENCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Active {
    assessment: ZoneAssessment,
    bbox: Option<BoundingBox>,
    expiry_ms: u64,
}

/// The fusion state machine. Apply events in non-decreasing timestamp order.
#[derive(Clone, Debug)]
pub struct FusionState {
    config: FusionConfig,
    armed: BTreeMap<Sector, u64>,
    side_active: BTreeMap<Sector, Active>,
    front_active: BTreeMap<String, Active>,
    last_seen_ms: u64,
    dropped_unarmed: u64,
}

impl FusionState {
    pub fn new(config: FusionConfig) -> Self {
        FusionState {
            config,
            armed: BTreeMap::new(),
            side_active: BTreeMap::new(),
            front_active: BTreeMap::new(),
            last_seen_ms: 0,
            dropped_unarmed: 0,
        }
    }

    pub fn config(&self) -> &FusionConfig {
        &self.config
    }

    pub fn last_seen_ms(&self) -> u64 {
        self.last_seen_ms
    }

    /// Range readings dropped because their sector was not armed.
    pub fn dropped_unarmed(&self) -> u64 {
        self.dropped_unarmed
    }

    pub fn is_armed(&self, sector: Sector) -> bool {
        self.armed.contains_key(&sector)
    }

    fn advance(&mut self, timestamp_ms: u64) -> Result<()> {
        if timestamp_ms < self.last_seen_ms {
            return Err(Error::OutOfOrder {
                timestamp_ms,
                last_seen_ms: self.last_seen_ms,
            });
        }
        self.last_seen_ms = timestamp_ms;
        Ok(())
    }

    /// Arms the event's sector (idempotently, refreshing the arm timestamp)
    /// and asks the sensor layer to take a measurement there.
    pub fn on_motion(&mut self, event: &MotionEvent) -> Result<Command> {
        ensure_ultrasonic(event.sector)?;
        self.advance(event.timestamp_ms)?;
        self.armed.insert(event.sector, event.timestamp_ms);
        Ok(Command::ActivateUltrasonic(event.sector))
    }

    /// Consumes the sector's arming and turns the reading into an assessment.
    /// Readings on unarmed sectors are dropped (counted, not an error);
    /// readings beyond the ceiling yield a Safe assessment flagged
    /// out-of-range.
    pub fn on_range(&mut self, reading: &RangeReading) -> Result<Option<ZoneAssessment>> {
        ensure_ultrasonic(reading.sector)?;
        if let Some(d) = reading.distance_m {
            positive_finite("distance_m", d)?;
        }
        self.advance(reading.timestamp_ms)?;
        if self.armed.remove(&reading.sector).is_none() {
            self.dropped_unarmed += 1;
            return Ok(None);
        }
        let t = reading.timestamp_ms;
        let assessment = match reading.distance_m {
            Some(d) if d <= self.config.max_range_m => ZoneAssessment::classified(
                t,
                reading.sector,
                None,
                d,
                &self.config.bands,
                &self.config.colors,
            )?,
            _ => ZoneAssessment::out_of_range(t, reading.sector, &self.config.colors),
        };
        self.side_active.insert(
            reading.sector,
            Active {
                assessment: assessment.clone(),
                bbox: None,
                expiry_ms: t + self.config.hold_ms,
            },
        );
        Ok(Some(assessment))
    }

    /// Ranges every sufficiently confident box in the frame through the
    /// camera model, one assessment per subject.
    pub fn on_detection_frame(
        &mut self,
        frame: &DetectionFrame,
        profile: &CalibrationProfile,
    ) -> Result<Vec<ZoneAssessment>> {
        self.advance(frame.timestamp_ms)?;
        let t = frame.timestamp_ms;
        let mut out = Vec::new();
        for bbox in &frame.boxes {
            if bbox.confidence < self.config.min_confidence {
                continue;
            }
            let distance = estimate_distance(profile, bbox.height_px)?;
            let assessment = ZoneAssessment::classified(
                t,
                Sector::Front,
                Some(bbox.subject_id.clone()),
                distance,
                &self.config.bands,
                &self.config.colors,
            )?;
            self.front_active.insert(
                bbox.subject_id.clone(),
                Active {
                    assessment: assessment.clone(),
                    bbox: Some(bbox.clone()),
                    expiry_ms: t + self.config.hold_ms,
                },
            );
            out.push(assessment);
        }
        Ok(out)
    }

    /// Drops assessments whose expiry has passed (expiry is inclusive) and
    /// reports the sectors that reverted to idle. Never fails; a `now_ms`
    /// earlier than the last seen timestamp is a no-op.
    pub fn tick(&mut self, now_ms: u64) -> Vec<Sector> {
        if now_ms < self.last_seen_ms {
            return Vec::new();
        }
        self.last_seen_ms = now_ms;
        let mut reverted = Vec::new();
        let expired: Vec<Sector> = self
            .side_active
            .iter()
            .filter(|(_, active)| now_ms >= active.expiry_ms)
            .map(|(sector, _)| *sector)
            .collect();
        for sector in expired {
            self.side_active.remove(&sector);
            reverted.push(sector);
        }
        let had_front = !self.front_active.is_empty();
        self.front_active.retain(|_, active| now_ms < active.expiry_ms);
        if had_front && self.front_active.is_empty() {
            reverted.push(Sector::Front);
        }
        reverted.sort();
        reverted
    }

    /// Most severe tag among currently-active front subjects.
    pub fn front_headline(&self) -> ZoneTag {
        most_severe_tag(self.front_active.values().map(|a| a.assessment.tag))
    }

    /// Snapshot of the current display state.
    pub fn overlay(&self, timestamp_ms: u64) -> Result<OverlayFrame> {
        let sectors: Vec<ZoneAssessment> = self
            .side_active
            .values()
            .map(|a| a.assessment.clone())
            .collect();
        let subjects: Vec<FrontSubject> = self
            .front_active
            .values()
            .map(|a| FrontSubject {
                assessment: a.assessment.clone(),
                bbox: a.bbox.clone(),
            })
            .collect();
        render_overlay(timestamp_ms, &sectors, &subjects, &self.config.colors)
    }
}
