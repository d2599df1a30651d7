use std::path::Path;

use serde::{Deserialize, Serialize};

use fcn_core::layout::LayoutStats;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub commands: Vec<Record>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub cmd: String,
    pub name: Option<String>,
    pub stats: Option<StatsRecord>,
    pub runtime_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub w: u32,
    pub h: u32,
    pub gates: usize,
    pub wires: usize,
    pub crossings: usize,
    pub latches: usize,
    pub cp: usize,
    pub tp_denominator: u32,
    pub bbox_w: u32,
    pub bbox_h: u32,
    pub energy_slow_mev: f64,
    pub energy_fast_mev: f64,
}

impl From<&LayoutStats> for StatsRecord {
    fn from(s: &LayoutStats) -> Self {
        StatsRecord {
            w: s.width,
            h: s.height,
            gates: s.gates,
            wires: s.wires,
            crossings: s.crossings,
            latches: s.latches,
            cp: s.critical_path,
            tp_denominator: s.throughput,
            bbox_w: s.bounding_box.0,
            bbox_h: s.bounding_box.1,
            energy_slow_mev: s.energy.0,
            energy_fast_mev: s.energy.1,
        }
    }
}

impl RunLog {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("log records serialize")
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }
}
