//! Coverage sectors around the wearer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// One of the four monitored directions. `Front` is camera-ranged; the other
/// three are covered by motion-gated ultrasonic sensors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Front,
    Left,
    Right,
    Back,
}

impl Sector {
    pub const ALL: [Sector; 4] = [Sector::Front, Sector::Left, Sector::Right, Sector::Back];

    /// Sectors covered by ultrasonic sensors (everything but `Front`).
    pub const ULTRASONIC: [Sector; 3] = [Sector::Left, Sector::Right, Sector::Back];

    pub fn is_ultrasonic(self) -> bool {
        self != Sector::Front
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sector::Front => "front",
            Sector::Left => "left",
            Sector::Right => "right",
            Sector::Back => "back",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "front" => Ok(Sector::Front),
            "left" => Ok(Sector::Left),
            "right" => Ok(Sector::Right),
            "back" => Ok(Sector::Back),
            other => Err(Error::invalid_argument(
                "sector",
                format!("expected one of front/left/right/back, got `{other}`"),
            )),
        }
    }
}
