//! Distance zone classification and overlay frames.
//!
//! Distances partition into three zones: Unsafe covers (0, 0.5] m, Warning
//! covers (0.5, 1.0) m, and Safe covers [1.0, inf) m. Each zone carries a
//! display color. An `OverlayFrame` is the declarative counterpart of the
//! wearer-facing display: one entry per sector plus one entry per subject
//! seen by the front camera.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{positive_finite, Error, Result};
use crate::optics::BoundingBox;
use crate::sector::Sector;

/// Zone verdict for a single distance. Declaration order is severity order,
/// so `Ord` compares severity: `Safe < Warning < Unsafe`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZoneTag {
    Safe,
    Warning,
    Unsafe,
}

impl ZoneTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ZoneTag::Safe => "Safe",
            ZoneTag::Warning => "Warning",
            ZoneTag::Unsafe => "Unsafe",
        }
    }
}

impl fmt::Display for ZoneTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named display color with its RGB triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Color {
    pub name: String,
    pub rgb: (u8, u8, u8),
}

impl Color {
    pub fn new(name: impl Into<String>, rgb: (u8, u8, u8)) -> Self {
        Color {
            name: name.into(),
            rgb,
        }
    }

    pub fn green() -> Self {
        Color::new("Green", (0, 128, 0))
    }

    pub fn orange() -> Self {
        Color::new("Orange", (255, 165, 0))
    }

    pub fn red() -> Self {
        Color::new("Red", (255, 0, 0))
    }
}

/// Total mapping from zone tag to display color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorScheme {
    safe: Color,
    warning: Color,
    unsafe_: Color,
}

impl Default for ColorScheme {
    fn default() -> Self {
        ColorScheme {
            safe: Color::green(),
            warning: Color::orange(),
            unsafe_: Color::red(),
        }
    }
}

impl ColorScheme {
    pub fn color(&self, tag: ZoneTag) -> &Color {
        match tag {
            ZoneTag::Safe => &self.safe,
            ZoneTag::Warning => &self.warning,
            ZoneTag::Unsafe => &self.unsafe_,
        }
    }

    pub fn set(&mut self, tag: ZoneTag, color: Color) {
        match tag {
            ZoneTag::Safe => self.safe = color,
            ZoneTag::Warning => self.warning = color,
            ZoneTag::Unsafe => self.unsafe_ = color,
        }
    }
}

/// Zone boundaries in meters. `unsafe_max_m` closes the Unsafe interval and
/// `safe_min_m` opens the Safe interval; Warning fills the open gap between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneBands {
    unsafe_max_m: f64,
    safe_min_m: f64,
}

impl Default for ZoneBands {
    fn default() -> Self {
        ZoneBands {
            unsafe_max_m: 0.5,
            safe_min_m: 1.0,
        }
    }
}

impl ZoneBands {
    pub fn new(unsafe_max_m: f64, safe_min_m: f64) -> Result<Self> {
        positive_finite("unsafe_max_m", unsafe_max_m)?;
        positive_finite("safe_min_m", safe_min_m)?;
        if unsafe_max_m >= safe_min_m {
            return Err(Error::invalid_argument(
                "unsafe_max_m",
                format!("must be below safe_min_m, got {unsafe_max_m} >= {safe_min_m}"),
            ));
        }
        Ok(ZoneBands {
            unsafe_max_m,
            safe_min_m,
        })
    }

    pub fn unsafe_max_m(&self) -> f64 {
        self.unsafe_max_m
    }

    pub fn safe_min_m(&self) -> f64 {
        self.safe_min_m
    }

    pub fn classify(&self, distance_m: f64) -> Result<ZoneTag> {
        positive_finite("distance_m", distance_m)?;
        if distance_m <= self.unsafe_max_m {
            Ok(ZoneTag::Unsafe)
        } else if distance_m < self.safe_min_m {
            Ok(ZoneTag::Warning)
        } else {
            Ok(ZoneTag::Safe)
        }
    }
}

/// Classifies a distance against the default 0.5 m / 1.0 m boundaries.
pub fn classify(distance_m: f64) -> Result<ZoneTag> {
    ZoneBands::default().classify(distance_m)
}

/// Highest-severity tag present; `Safe` when the list is empty.
pub fn most_severe(assessments: &[ZoneAssessment]) -> ZoneTag {
    most_severe_tag(assessments.iter().map(|a| a.tag))
}

pub fn most_severe_tag(tags: impl IntoIterator<Item = ZoneTag>) -> ZoneTag {
    tags.into_iter().max().unwrap_or(ZoneTag::Safe)
}

/// A classified proximity verdict for one sector or one tracked subject.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneAssessment {
    pub timestamp_ms: u64,
    pub sector: Sector,
    pub subject_id: Option<String>,
    /// `None` when the ranger saw nothing inside its ceiling.
    pub distance_m: Option<f64>,
    pub tag: ZoneTag,
    pub color: Color,
    pub out_of_range: bool,
}

impl ZoneAssessment {
    /// Builds an assessment from a finite distance reading, classifying it
    /// against `bands` so the tag always matches the distance.
    pub fn classified(
        timestamp_ms: u64,
        sector: Sector,
        subject_id: Option<String>,
        distance_m: f64,
        bands: &ZoneBands,
        scheme: &ColorScheme,
    ) -> Result<Self> {
        let tag = bands.classify(distance_m)?;
        Ok(ZoneAssessment {
            timestamp_ms,
            sector,
            subject_id,
            distance_m: Some(distance_m),
            tag,
            color: scheme.color(tag).clone(),
            out_of_range: false,
        })
    }

    /// Builds the nothing-within-reach verdict: tag Safe, no distance, with
    /// the out-of-range flag set.
    pub fn out_of_range(timestamp_ms: u64, sector: Sector, scheme: &ColorScheme) -> Self {
        ZoneAssessment {
            timestamp_ms,
            sector,
            subject_id: None,
            distance_m: None,
            tag: ZoneTag::Safe,
            color: scheme.color(ZoneTag::Safe).clone(),
            out_of_range: true,
        }
    }
}

/// Display state of one sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorEntry {
    pub sector: Sector,
    pub tag: ZoneTag,
    pub color: Color,
    pub distance_m: Option<f64>,
}

/// Display state of one front-camera subject.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectEntry {
    pub subject_id: String,
    pub bbox: Option<BoundingBox>,
    pub distance_m: Option<f64>,
    pub tag: ZoneTag,
    pub color: Color,
}

/// One rendered display frame: exactly one entry per sector, in fixed
/// front/left/right/back order, plus per-subject entries sorted by id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlayFrame {
    pub timestamp_ms: u64,
    pub sectors: Vec<SectorEntry>,
    pub subjects: Vec<SubjectEntry>,
}

/// A front-camera assessment together with the box that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontSubject {
    pub assessment: ZoneAssessment,
    pub bbox: Option<BoundingBox>,
}

/// Builds an overlay frame. Sectors without an assessment render idle
/// (Safe, no distance); the front sector summarizes its subjects by the
/// most severe tag among them and the nearest distance.
pub fn render_overlay(
    timestamp_ms: u64,
    sector_assessments: &[ZoneAssessment],
    front_subjects: &[FrontSubject],
    scheme: &ColorScheme,
) -> Result<OverlayFrame> {
    let mut by_sector: std::collections::BTreeMap<Sector, &ZoneAssessment> =
        std::collections::BTreeMap::new();
    for a in sector_assessments {
        if by_sector.insert(a.sector, a).is_some() {
            return Err(Error::DuplicateSector(a.sector));
        }
    }

    let mut subjects = Vec::with_capacity(front_subjects.len());
    let mut seen = std::collections::HashSet::new();
    for fs in front_subjects {
        let id = fs
            .assessment
            .subject_id
            .clone()
            .unwrap_or_default();
        if !seen.insert(id.clone()) {
            return Err(Error::invalid_argument(
                "front_subjects",
                format!("duplicate subject_id `{id}`"),
            ));
        }
        subjects.push(SubjectEntry {
            subject_id: id,
            bbox: fs.bbox.clone(),
            distance_m: fs.assessment.distance_m,
            tag: fs.assessment.tag,
            color: fs.assessment.color.clone(),
        });
    }
    subjects.sort_by(|a, b| a.subject_id.cmp(&b.subject_id));

    let mut sectors = Vec::with_capacity(Sector::ALL.len());
    for sector in Sector::ALL {
        let entry = match by_sector.get(&sector) {
            Some(a) => SectorEntry {
                sector,
                tag: a.tag,
                color: a.color.clone(),
                distance_m: a.distance_m,
            },
            None if sector == Sector::Front && !subjects.is_empty() => {
                let tag = most_severe_tag(subjects.iter().map(|s| s.tag));
                SectorEntry {
                    sector,
                    tag,
                    color: scheme.color(tag).clone(),
                    distance_m: subjects
                        .iter()
                        .filter_map(|s| s.distance_m)
                        .min_by(|a, b| a.total_cmp(b)),
                }
            }
            None => SectorEntry {
                sector,
                tag: ZoneTag::Safe,
                color: scheme.color(ZoneTag::Safe).clone(),
                distance_m: None,
            },
        };
        sectors.push(entry);
    }

    Ok(OverlayFrame {
        timestamp_ms,
        sectors,
        subjects,
    })
}
