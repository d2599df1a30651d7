use std::fmt;

use serde::Serialize;

use super::{EnergyTable, GateLayout, LayoutError, Throughput};

/// Summary figures of a layout. Fan-outs and pins count as gates, so `wires`
/// measures pure routing cost; a crossing tile contributes two wires.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayoutStats {
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub gates: usize,
    pub wires: usize,
    pub crossings: usize,
    pub latches: usize,
    pub critical_path: usize,
    pub throughput: u32,
    pub bounding_box: (u32, u32),
    pub energy: (f64, f64),
}

impl fmt::Display for LayoutStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} x {}, #G: {}, #W: {}, #C: {}, #L: {}, CP: {}, TP: {}",
            self.name,
            self.width,
            self.height,
            self.gates,
            self.wires,
            self.crossings,
            self.latches,
            self.critical_path,
            Throughput {
                denominator: self.throughput
            }
        )
    }
}

impl GateLayout {
    /// Smallest rectangle anchored anywhere that encloses all occupied tiles.
    pub fn bounding_box(&self) -> (u32, u32) {
        let tiles = self.occupied_tiles();
        let (Some(x0), Some(x1)) = (tiles.iter().map(|t| t.x).min(), tiles.iter().map(|t| t.x).max()) else {
            return (0, 0);
        };
        let y0 = tiles.iter().map(|t| t.y).min().unwrap_or(0);
        let y1 = tiles.iter().map(|t| t.y).max().unwrap_or(0);
        (x1 - x0 + 1, y1 - y0 + 1)
    }

    pub fn statistics(&self, energy: &EnergyTable) -> Result<LayoutStats, LayoutError> {
        let timing = self.timing()?;
        let wires = self.wire_tiles().map(|(_, s)| s.len()).sum();
        let crossings = self.wire_tiles().filter(|(_, s)| s.len() == 2).count();
        let energy = self
            .energy_estimate(energy)
            .map_err(|e| LayoutError::Invalid(e.to_string()))?;
        Ok(LayoutStats {
            name: self.name.clone(),
            width: self.width,
            height: self.height,
            gates: self.placed_vertices().count(),
            wires,
            crossings,
            latches: self.latches().count(),
            critical_path: timing.critical_path,
            throughput: timing.throughput.denominator,
            bounding_box: self.bounding_box(),
            energy,
        })
    }
}
