//! Clocking schemes.
//!
//! A regular scheme stores a small cutout of clock numbers that repeats over
//! the whole grid; an open scheme leaves clock numbers to the layout.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::Tile;

const BUILTIN: &str = include_str!("../data/clocking_schemes.json");

#[derive(Debug, Error)]
pub enum ClockingError {
    #[error("unknown clocking scheme `{0}`")]
    Unknown(String),
    #[error("invalid clocking scheme `{name}`: {reason}")]
    Invalid { name: String, reason: String },
    #[error("cannot read scheme file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scheme file: {0}")]
    Format(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockingScheme {
    pub name: String,
    pub phases: u8,
    /// Row-major cutout, present iff the scheme is regular.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutout: Option<Vec<Vec<u8>>>,
}

#[derive(Deserialize)]
struct SchemeFile {
    schemes: Vec<ClockingScheme>,
}

impl ClockingScheme {
    /// Builds a regular scheme, validating the cutout.
    pub fn regular(name: impl Into<String>, phases: u8, cutout: Vec<Vec<u8>>) -> Result<Self, ClockingError> {
        let s = ClockingScheme {
            name: name.into(),
            phases,
            cutout: Some(cutout),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn open(phases: u8) -> Self {
        ClockingScheme {
            name: format!("open{phases}"),
            phases,
            cutout: None,
        }
    }

    /// The N-phase two-dimensional diagonal wave: clock(x, y) = (x + y) mod N.
    pub fn two_d_d_wave(phases: u8) -> Self {
        let n = phases as usize;
        let cutout = (0..n).map(|y| (0..n).map(|x| ((x + y) % n) as u8).collect()).collect();
        ClockingScheme {
            name: format!("2ddwave{phases}"),
            phases,
            cutout: Some(cutout),
        }
    }

    /// Looks up a predefined scheme by (case-insensitive) name.
    pub fn from_name(name: &str) -> Result<Self, ClockingError> {
        let wanted = name.to_ascii_lowercase();
        builtin_schemes()
            .into_iter()
            .find(|s| s.name == wanted)
            .ok_or_else(|| ClockingError::Unknown(name.to_string()))
    }

    /// Loads user-defined schemes from a JSON file of the same shape as the
    /// built-in table.
    pub fn load_file(path: &Path) -> Result<Vec<Self>, ClockingError> {
        let text = std::fs::read_to_string(path)?;
        parse_table(&text)
    }

    pub fn is_regular(&self) -> bool {
        self.cutout.is_some()
    }

    /// Cutout size as (rows, columns).
    pub fn cutout_size(&self) -> Option<(usize, usize)> {
        self.cutout.as_ref().map(|c| (c.len(), c[0].len()))
    }

    /// Clock number of a tile, or `None` for open schemes.
    pub fn clock_number(&self, t: Tile) -> Option<u8> {
        let cutout = self.cutout.as_ref()?;
        let rows = cutout.len();
        let cols = cutout[0].len();
        Some(cutout[t.y as usize % rows][t.x as usize % cols])
    }

    pub fn validate(&self) -> Result<(), ClockingError> {
        let invalid = |reason: String| ClockingError::Invalid {
            name: self.name.clone(),
            reason,
        };
        if self.phases < 2 {
            return Err(invalid(format!("needs at least 2 phases, got {}", self.phases)));
        }
        if let Some(cutout) = &self.cutout {
            let cols = cutout.first().map(Vec::len).unwrap_or(0);
            if cols == 0 {
                return Err(invalid("empty cutout".into()));
            }
            for (r, row) in cutout.iter().enumerate() {
                if row.len() != cols {
                    return Err(invalid(format!("row {r} has {} entries, expected {cols}", row.len())));
                }
                if let Some(&z) = row.iter().find(|&&z| z >= self.phases) {
                    return Err(invalid(format!("clock {z} in row {r} is not below {}", self.phases)));
                }
            }
        }
        Ok(())
    }
}

fn parse_table(text: &str) -> Result<Vec<ClockingScheme>, ClockingError> {
    let file: SchemeFile = serde_json::from_str(text)?;
    for s in &file.schemes {
        s.validate()?;
    }
    Ok(file
        .schemes
        .into_iter()
        .map(|mut s| {
            s.name = s.name.to_ascii_lowercase();
            s
        })
        .collect())
}

/// All predefined schemes.
pub fn builtin_schemes() -> Vec<ClockingScheme> {
    parse_table(BUILTIN).expect("built-in scheme table is valid")
}
