//! Scenario classification shared across modules.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VruKind {
    Pedestrian,
    Cyclist,
}

/// Real-world trial versus cyber-physical (projected virtual scene) trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "RW", alias = "rw")]
    Rw,
    #[serde(rename = "CP", alias = "cp")]
    Cp,
}

/// Relative approach geometry between vehicle and VRU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Perspective {
    /// Straight.
    S,
    /// Diagonal.
    D,
    /// Crosswise.
    C,
}

impl fmt::Display for VruKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VruKind::Pedestrian => "pedestrian",
            VruKind::Cyclist => "cyclist",
        })
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Rw => "RW",
            Domain::Cp => "CP",
        })
    }
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Perspective::S => "S",
            Perspective::D => "D",
            Perspective::C => "C",
        })
    }
}
