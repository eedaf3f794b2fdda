//! Timestamp-ordered event application.
//!
//! Merges heterogeneous sensor events into one deterministic order and
//! drives the fusion state machine, expiring stale assessments as time
//! advances. Tie-break at equal timestamps: motion, then range, then
//! detection frame, then sector order.

use crate::error::Result;
use crate::fusion::{Command, FusionConfig, FusionState, MotionEvent, RangeReading};
use crate::optics::{CalibrationProfile, DetectionFrame};
use crate::sector::Sector;
use crate::zones::ZoneAssessment;

#[derive(Clone, Debug, PartialEq)]
pub enum InputEvent {
    Motion(MotionEvent),
    Range(RangeReading),
    Frame(DetectionFrame),
}

impl InputEvent {
    pub fn timestamp_ms(&self) -> u64 {
        match self {
            InputEvent::Motion(e) => e.timestamp_ms,
            InputEvent::Range(r) => r.timestamp_ms,
            InputEvent::Frame(f) => f.timestamp_ms,
        }
    }

    fn sort_key(&self) -> (u64, u8, Sector) {
        match self {
            InputEvent::Motion(e) => (e.timestamp_ms, 0, e.sector),
            InputEvent::Range(r) => (r.timestamp_ms, 1, r.sector),
            InputEvent::Frame(f) => (f.timestamp_ms, 2, Sector::Front),
        }
    }
}

/// Sorts events into deterministic application order.
pub fn sort_events(events: &mut [InputEvent]) {
    events.sort_by_key(InputEvent::sort_key);
}

/// Everything one event application produced.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct StepOutput {
    /// Sectors that reverted to idle before the event was applied.
    pub reverted: Vec<Sector>,
    pub command: Option<Command>,
    pub assessments: Vec<ZoneAssessment>,
}

/// Fusion state plus the camera profile it ranges front detections with.
#[derive(Clone, Debug)]
pub struct Pipeline {
    state: FusionState,
    profile: CalibrationProfile,
}

impl Pipeline {
    pub fn new(config: FusionConfig, profile: CalibrationProfile) -> Self {
        Pipeline {
            state: FusionState::new(config),
            profile,
        }
    }

    pub fn state(&self) -> &FusionState {
        &self.state
    }

    pub fn profile(&self) -> &CalibrationProfile {
        &self.profile
    }

    /// Expires stale assessments at the event's timestamp, then applies it.
    pub fn apply(&mut self, event: &InputEvent) -> Result<StepOutput> {
        let reverted = self.state.tick(event.timestamp_ms());
        let mut out = StepOutput {
            reverted,
            ..StepOutput::default()
        };
        match event {
            InputEvent::Motion(e) => out.command = Some(self.state.on_motion(e)?),
            InputEvent::Range(r) => {
                if let Some(a) = self.state.on_range(r)? {
                    out.assessments.push(a);
                }
            }
            InputEvent::Frame(f) => {
                out.assessments = self.state.on_detection_frame(f, &self.profile)?;
            }
        }
        Ok(out)
    }

    /// Applies a pre-sorted batch and collects every assessment emitted.
    pub fn run(&mut self, events: &[InputEvent]) -> Result<Vec<ZoneAssessment>> {
        let mut all = Vec::new();
        for event in events {
            all.extend(self.apply(event)?.assessments);
        }
        Ok(all)
    }
}
