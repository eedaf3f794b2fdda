//! Line-delimited JSON stream schemas and parsing.
//!
//! Four streams: `detections.jsonl`, `motions.jsonl`, `ranges.jsonl` on the
//! way in and `events.jsonl` on the way out. One UTF-8 JSON object per line,
//! `\n` terminated. A `null` range distance encodes an out-of-range sweep.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{MotionEvent, RangeReading};
use crate::optics::{BoundingBox, DetectionFrame};
use crate::pipeline::{sort_events, InputEvent};
use crate::sector::Sector;
use crate::zones::{ZoneAssessment, ZoneTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BboxRecord {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub t_ms: u64,
    pub subject_id: String,
    pub bbox: BboxRecord,
    pub confidence: f64,
}

impl DetectionRecord {
    pub fn to_bounding_box(&self) -> Result<BoundingBox> {
        BoundingBox::new(
            self.bbox.x as f64,
            self.bbox.y as f64,
            self.bbox.w as f64,
            self.bbox.h as f64,
            self.confidence,
            self.subject_id.clone(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotionRecord {
    pub t_ms: u64,
    pub sector: Sector,
}

impl MotionRecord {
    pub fn to_event(&self) -> Result<MotionEvent> {
        MotionEvent::new(self.t_ms, self.sector)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeRecord {
    pub t_ms: u64,
    pub sector: Sector,
    pub distance_m: Option<f64>,
}

impl RangeRecord {
    pub fn to_reading(&self) -> Result<RangeReading> {
        match self.distance_m {
            Some(d) => RangeReading::new(self.t_ms, self.sector, d),
            None => RangeReading::out_of_range(self.t_ms, self.sector),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t_ms: u64,
    pub sector: Sector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
    pub tag: ZoneTag,
    pub color: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub out_of_range: bool,
}

impl EventRecord {
    pub fn from_assessment(a: &ZoneAssessment) -> Self {
        EventRecord {
            t_ms: a.timestamp_ms,
            sector: a.sector,
            subject_id: a.subject_id.clone(),
            distance_m: a.distance_m,
            tag: a.tag,
            color: a.color.name.clone(),
            out_of_range: a.out_of_range,
        }
    }
}

/// Parses one record per line; blank lines are skipped. Errors carry the
/// 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(reader: impl BufRead) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let record = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Writes one record per line, `\n` terminated.
pub fn write_jsonl<'a, T: Serialize + 'a>(
    mut writer: impl Write,
    records: impl IntoIterator<Item = &'a T>,
) -> Result<()> {
    for record in records {
        let line = serde_json::to_string(record).map_err(|e| Error::Parse {
            line: 0,
            message: e.to_string(),
        })?;
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn events_to_jsonl(assessments: &[ZoneAssessment]) -> Result<String> {
    let records: Vec<EventRecord> = assessments.iter().map(EventRecord::from_assessment).collect();
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &records)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Groups detection records into frames, one frame per distinct timestamp.
/// Records are sorted by timestamp first; order within a frame is preserved.
pub fn frames_from_detections(records: &[DetectionRecord]) -> Result<Vec<DetectionFrame>> {
    let mut sorted: Vec<&DetectionRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.t_ms);
    let mut frames: Vec<DetectionFrame> = Vec::new();
    let mut current: Vec<BoundingBox> = Vec::new();
    let mut current_t: Option<u64> = None;
    for record in sorted {
        if current_t != Some(record.t_ms) {
            if let Some(t) = current_t {
                frames.push(DetectionFrame::new(t, std::mem::take(&mut current))?);
            }
            current_t = Some(record.t_ms);
        }
        current.push(record.to_bounding_box()?);
    }
    if let Some(t) = current_t {
        frames.push(DetectionFrame::new(t, current)?);
    }
    Ok(frames)
}

/// Converts the three input streams into one sorted event sequence ready for
/// replay.
pub fn merge_streams(
    detections: &[DetectionRecord],
    motions: &[MotionRecord],
    ranges: &[RangeRecord],
) -> Result<Vec<InputEvent>> {
    let mut events: Vec<InputEvent> = Vec::new();
    for frame in frames_from_detections(detections)? {
        events.push(InputEvent::Frame(frame));
    }
    for m in motions {
        events.push(InputEvent::Motion(m.to_event()?));
    }
    for r in ranges {
        events.push(InputEvent::Range(r.to_reading()?));
    }
    sort_events(&mut events);
    Ok(events)
}
