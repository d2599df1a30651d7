//! Energy estimate from per-tile-kind coefficients.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GateLayout, Tile};
use crate::network::Op;

const BUILTIN: &str = include_str!("../../data/energy_qca_one.json");

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("no energy coefficient for tile kind `{kind}` (tile {tile})")]
    Missing { kind: &'static str, tile: Tile },
    #[error("cannot read energy table: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed energy table: {0}")]
    Format(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub slow: f64,
    pub fast: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyTable {
    pub name: String,
    pub unit: String,
    #[serde(default)]
    pub note: String,
    pub kinds: BTreeMap<String, Coefficient>,
}

impl EnergyTable {
    pub fn qca_one() -> Self {
        serde_json::from_str(BUILTIN).expect("built-in energy table is valid")
    }

    pub fn load(path: &Path) -> Result<Self, EnergyError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

impl GateLayout {
    /// Kind of an occupied tile as named in energy tables and gate libraries.
    pub fn tile_kind(&self, t: Tile) -> Option<&'static str> {
        if let Some(v) = self.vertex_at(t) {
            return Some(match self.network.op(v) {
                Op::Not => "inverter",
                Op::Const0 | Op::Const1 => "const",
                op => op.name(),
            });
        }
        match self.wires_at(t).len() {
            0 => None,
            2 => Some("crossing"),
            _ if self.latch(t) > 0 => Some("latch"),
            _ => Some("wire"),
        }
    }

    /// Sum of the (slow, fast) coefficients over all occupied tiles.
    pub fn energy_estimate(&self, table: &EnergyTable) -> Result<(f64, f64), EnergyError> {
        let mut slow = 0.0;
        let mut fast = 0.0;
        for t in self.occupied_tiles() {
            let kind = self.tile_kind(t).expect("occupied tile has a kind");
            let c = table.kinds.get(kind).ok_or(EnergyError::Missing { kind, tile: t })?;
            slow += c.slow;
            fast += c.fast;
        }
        Ok((slow, fast))
    }
}
