//! JSON form of a gate layout, used for fixtures and the CLI's `store`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Dir, GateLayout, Layer, LayoutError, Tile};
use crate::clocking::ClockingScheme;
use crate::network::{EdgeId, LogicNetwork, NetworkData, NetworkError, VertexId};

#[derive(Debug, Error)]
pub enum LayoutFileError {
    #[error("cannot access layout file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed layout file: {0}")]
    Format(#[from] serde_json::Error),
    #[error("bad network in layout file: {0}")]
    Network(#[from] NetworkError),
    #[error("bad layout file: {0}")]
    Layout(#[from] LayoutError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedVertex {
    pub x: u32,
    pub y: u32,
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedWire {
    pub x: u32,
    pub y: u32,
    pub edge: usize,
    pub layer: Layer,
    pub entry: Dir,
    pub exit: Dir,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileValue {
    pub x: u32,
    pub y: u32,
    pub value: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutData {
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub scheme: ClockingScheme,
    pub allow_crossings: bool,
    pub network: NetworkData,
    pub vertices: Vec<PlacedVertex>,
    pub wires: Vec<PlacedWire>,
    #[serde(default)]
    pub clocks: Vec<TileValue>,
    #[serde(default)]
    pub latches: Vec<TileValue>,
}

impl GateLayout {
    pub fn to_data(&self) -> LayoutData {
        LayoutData {
            name: self.name.clone(),
            width: self.width,
            height: self.height,
            scheme: self.scheme.clone(),
            allow_crossings: self.allow_crossings,
            network: self.network.to_data(),
            vertices: self
                .placed_vertices()
                .map(|(t, v)| PlacedVertex {
                    x: t.x,
                    y: t.y,
                    vertex: v.0,
                })
                .collect(),
            wires: self
                .wire_tiles()
                .flat_map(|(t, segs)| {
                    segs.iter().map(move |s| PlacedWire {
                        x: t.x,
                        y: t.y,
                        edge: s.edge.0,
                        layer: s.layer,
                        entry: s.entry,
                        exit: s.exit,
                    })
                })
                .collect(),
            clocks: self
                .assigned_clocks()
                .map(|(t, z)| TileValue {
                    x: t.x,
                    y: t.y,
                    value: z,
                })
                .collect(),
            latches: self
                .latches()
                .map(|(t, d)| TileValue {
                    x: t.x,
                    y: t.y,
                    value: d,
                })
                .collect(),
        }
    }

    pub fn from_data(data: &LayoutData) -> Result<GateLayout, LayoutFileError> {
        let net = Arc::new(LogicNetwork::from_data(&data.network)?);
        let mut l = GateLayout::new(data.width, data.height, data.scheme.clone(), net);
        l.set_name(data.name.clone());
        l.set_allow_crossings(data.allow_crossings);
        for p in &data.vertices {
            l.assign_logic_vertex(Tile::new(p.x, p.y), VertexId(p.vertex))?;
        }
        // ground segments first so a crossing never precedes its partner
        let mut wires: Vec<&PlacedWire> = data.wires.iter().collect();
        wires.sort_by_key(|w| w.layer);
        for w in wires {
            l.assign_wire(Tile::new(w.x, w.y), EdgeId(w.edge), w.layer, w.entry, w.exit)?;
        }
        for c in &data.clocks {
            l.assign_clock(Tile::new(c.x, c.y), c.value)?;
        }
        for c in &data.latches {
            l.assign_latch(Tile::new(c.x, c.y), c.value)?;
        }
        Ok(l)
    }

    pub fn save(&self, path: &Path) -> Result<(), LayoutFileError> {
        let text = serde_json::to_string_pretty(&self.to_data())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<GateLayout, LayoutFileError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_json(text: &str) -> Result<GateLayout, LayoutFileError> {
        let data: LayoutData = serde_json::from_str(text)?;
        Self::from_data(&data)
    }
}
