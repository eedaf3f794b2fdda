//! Flat key=value runtime configuration.
//!
//! Every key has a default, so an absent file or empty text is a valid
//! configuration. Lines are `key = value`; `#` starts a comment.

use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::Denominator;
use crate::fusion::{FusionConfig, DEFAULT_HOLD_MS, DEFAULT_MAX_RANGE_M, DEFAULT_MIN_CONFIDENCE};
use crate::optics::DEFAULT_SUBJECT_EXTENT_M;
use crate::zones::{Color, ColorScheme, ZoneBands, ZoneTag};

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub safe_min_m: f64,
    pub unsafe_max_m: f64,
    pub assumed_subject_extent_m: f64,
    pub hold_ms: u64,
    pub max_range_m: f64,
    pub min_confidence: f64,
    pub denominator: Denominator,
    pub colors: ColorScheme,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            safe_min_m: 1.0,
            unsafe_max_m: 0.5,
            assumed_subject_extent_m: DEFAULT_SUBJECT_EXTENT_M,
            hold_ms: DEFAULT_HOLD_MS,
            max_range_m: DEFAULT_MAX_RANGE_M,
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            denominator: Denominator::Detected,
            colors: ColorScheme::default(),
        }
    }
}

impl Config {
    /// Parses key=value text over the defaults. All violations are collected
    /// and reported together, each prefixed with its key path.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        let mut violations = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                violations.push(format!("line {}: expected key=value, got `{line}`", idx + 1));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            let result = cfg.apply(key, value);
            if let Err(reason) = result {
                violations.push(format!("{key}: {reason}"));
            }
        }
        cfg.check(&mut violations);
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::validation(violations))
        }
    }

    /// Reads and parses a config file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Config::parse(&text)
    }

    fn apply(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "zone.safe_min_m" => self.safe_min_m = parse_f64(value)?,
            "zone.unsafe_max_m" => self.unsafe_max_m = parse_f64(value)?,
            "optics.assumed_subject_extent_m" => self.assumed_subject_extent_m = parse_f64(value)?,
            "fusion.hold_ms" => {
                self.hold_ms = value
                    .parse::<u64>()
                    .map_err(|_| format!("expected a non-negative integer, got `{value}`"))?
            }
            "sensor.max_range_m" => self.max_range_m = parse_f64(value)?,
            "detector.min_confidence" => self.min_confidence = parse_f64(value)?,
            "eval.denominator" => {
                self.denominator = value.parse().map_err(|e: Error| e.to_string())?
            }
            "color.safe" => self.colors.set(ZoneTag::Safe, parse_color(value)?),
            "color.warning" => self.colors.set(ZoneTag::Warning, parse_color(value)?),
            "color.unsafe" => self.colors.set(ZoneTag::Unsafe, parse_color(value)?),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    fn check(&self, violations: &mut Vec<String>) {
        if !(self.unsafe_max_m.is_finite() && self.unsafe_max_m > 0.0) {
            violations.push(format!(
                "zone.unsafe_max_m: expected a finite value > 0, got {}",
                self.unsafe_max_m
            ));
        }
        if !(self.safe_min_m.is_finite() && self.safe_min_m > 0.0) {
            violations.push(format!(
                "zone.safe_min_m: expected a finite value > 0, got {}",
                self.safe_min_m
            ));
        } else if self.unsafe_max_m >= self.safe_min_m {
            violations.push(format!(
                "zone.unsafe_max_m: must be below zone.safe_min_m, got {} >= {}",
                self.unsafe_max_m, self.safe_min_m
            ));
        }
        if !(self.assumed_subject_extent_m.is_finite() && self.assumed_subject_extent_m > 0.0) {
            violations.push(format!(
                "optics.assumed_subject_extent_m: expected a finite value > 0, got {}",
                self.assumed_subject_extent_m
            ));
        }
        if !(self.max_range_m.is_finite() && self.max_range_m > 0.0) {
            violations.push(format!(
                "sensor.max_range_m: expected a finite value > 0, got {}",
                self.max_range_m
            ));
        }
        if !(self.min_confidence.is_finite()
            && (0.0..=1.0).contains(&self.min_confidence))
        {
            violations.push(format!(
                "detector.min_confidence: expected a value in [0, 1], got {}",
                self.min_confidence
            ));
        }
    }

    pub fn zone_bands(&self) -> Result<ZoneBands> {
        ZoneBands::new(self.unsafe_max_m, self.safe_min_m)
    }

    pub fn fusion_config(&self) -> Result<FusionConfig> {
        Ok(FusionConfig {
            bands: self.zone_bands()?,
            colors: self.colors.clone(),
            hold_ms: self.hold_ms,
            max_range_m: self.max_range_m,
            min_confidence: self.min_confidence,
        })
    }
}

fn parse_f64(value: &str) -> std::result::Result<f64, String> {
    value
        .parse::<f64>()
        .map_err(|_| format!("expected a decimal number, got `{value}`"))
}

/// Color values are `Name,r,g,b`, e.g. `Teal,0,128,128`.
fn parse_color(value: &str) -> std::result::Result<Color, String> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected `Name,r,g,b`, got `{value}`"));
    }
    let channel = |s: &str| {
        s.parse::<u8>()
            .map_err(|_| format!("expected a channel in 0..=255, got `{s}`"))
    };
    Ok(Color::new(
        parts[0],
        (channel(parts[1])?, channel(parts[2])?, channel(parts[3])?),
    ))
}
