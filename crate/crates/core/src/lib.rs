//! Proximity sensing core for a wearable distance monitor.
//!
//! A single calibrated camera ranges subjects ahead of the wearer by
//! triangle similarity; motion-gated ultrasonic sensors cover the left,
//! right, and back sectors. Distances classify into Safe/Warning/Unsafe
//! zones, a fusion state machine turns raw sensor events into expiring
//! per-sector assessments, and a deterministic simulator plus a
//! percent-error harness make the whole pipeline testable without hardware.

pub mod config;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod jsonl;
pub mod optics;
pub mod pipeline;
pub mod sector;
pub mod sim;
pub mod svg;
pub mod zones;

pub use config::Config;
pub use error::{Error, Result};
pub use eval::{Denominator, MeasurementPair, PercentErrorReport};
pub use fusion::{Command, FusionConfig, FusionState, MotionEvent, RangeReading};
pub use optics::{BoundingBox, CalibrationProfile, DetectionFrame};
pub use pipeline::{InputEvent, Pipeline};
pub use sector::Sector;
pub use sim::{Scenario, SimulationLog};
pub use zones::{Color, ColorScheme, OverlayFrame, ZoneAssessment, ZoneBands, ZoneTag};
