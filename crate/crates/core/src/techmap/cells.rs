use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::library::{BlockKind, CellKind, GateLibrary};
use crate::layout::{Dir, GateLayout, Layer, Tile, Violation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub kind: CellKind,
    pub clock: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Position of a cell: column, row and layer (0 is ground).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellPos {
    pub x: u32,
    pub y: u32,
    pub layer: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellLayout {
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub phases: u8,
    cells: BTreeMap<CellPos, Cell>,
}

impl CellLayout {
    pub fn new(name: impl Into<String>, width: u32, height: u32, phases: u8) -> Self {
        CellLayout {
            name: name.into(),
            width,
            height,
            phases,
            cells: BTreeMap::new(),
        }
    }

    /// Places a cell, replacing whatever was there.
    pub fn set(&mut self, pos: CellPos, cell: Cell) {
        assert!(pos.x < self.width && pos.y < self.height, "cell outside the layout");
        self.cells.insert(pos, cell);
    }

    pub fn get(&self, pos: CellPos) -> Option<&Cell> {
        self.cells.get(&pos)
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellPos, &Cell)> {
        self.cells.iter().map(|(&p, c)| (p, c))
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.cells.values().filter(|c| c.kind == kind).count()
    }

    pub fn layers(&self) -> u8 {
        self.cells.keys().map(|p| p.layer + 1).max().unwrap_or(1)
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TechmapError {
    #[error("layout is not valid ({} violation(s), first: {})", .0.len(), .0[0].message)]
    Invalid(Vec<Violation>),
    #[error("library '{library}' has no {kind} block for tile {tile} with inputs [{ins}] and outputs [{outs}]")]
    Uncovered {
        library: String,
        kind: &'static str,
        tile: Tile,
        ins: String,
        outs: String,
    },
    #[error("block size {rows}x{cols} does not fit the layout")]
    TooLarge { rows: usize, cols: usize },
}

fn letters(ds: &[Dir]) -> String {
    ds.iter().map(|d| d.letter()).collect()
}

/// Maps every occupied tile to its library block. Blocks land at cell
/// origin (tile.x * cols, tile.y * rows) and inherit the tile's clock.
pub fn apply_library(layout: &GateLayout, lib: &GateLibrary) -> Result<CellLayout, TechmapError> {
    let violations = layout.check_validity();
    if !violations.is_empty() {
        return Err(TechmapError::Invalid(violations));
    }
    let routes = layout.routes().map_err(TechmapError::Invalid)?;
    let (rows, cols) = (lib.rows as u32, lib.cols as u32);
    let (width, height) = layout
        .width()
        .checked_mul(cols)
        .zip(layout.height().checked_mul(rows))
        .ok_or(TechmapError::TooLarge {
            rows: lib.rows,
            cols: lib.cols,
        })?;
    let mut out = CellLayout::new(layout.name(), width, height, layout.scheme().phases);

    let mut ins: BTreeMap<Tile, Vec<Dir>> = BTreeMap::new();
    let mut outs: BTreeMap<Tile, Vec<Dir>> = BTreeMap::new();
    for r in &routes {
        if let (Some(t), Some(d)) = (r.target, r.in_side()) {
            ins.entry(t).or_default().push(d);
        }
        if let (Some(s), Some(d)) = (r.source, r.out_side()) {
            outs.entry(s).or_default().push(d);
        }
    }

    let net = layout.network();
    for t in layout.occupied_tiles() {
        let (kind, i, o, label) = if let Some(v) = layout.vertex_at(t) {
            let i = ins.get(&t).cloned().unwrap_or_default();
            let o = outs.get(&t).cloned().unwrap_or_default();
            let op = net.op(v);
            let label = op.is_io().then(|| net.vertex(v).label.clone());
            (BlockKind::Vertex(op), i, o, label)
        } else {
            let segs = layout.wires_at(t);
            let mut segs = segs.to_vec();
            segs.sort_by_key(|s| s.layer);
            let kind = if segs.len() == 2 {
                debug_assert_eq!(segs[0].layer, Layer::Ground);
                BlockKind::Crossing
            } else {
                BlockKind::Wire
            };
            let i = segs.iter().map(|s| s.entry).collect();
            let o = segs.iter().map(|s| s.exit).collect();
            (kind, i, o, None)
        };
        let block = lib.lookup(kind, &i, &o).ok_or_else(|| TechmapError::Uncovered {
            library: lib.name.clone(),
            kind: kind.name(),
            tile: t,
            ins: letters(&i),
            outs: letters(&o),
        })?;
        let clock = layout.clock(t).expect("valid layouts clock every occupied tile");
        for (l, m) in block.layers.iter().enumerate() {
            for (y, row) in m.iter().enumerate() {
                for (x, k) in row.iter().enumerate() {
                    let Some(k) = *k else { continue };
                    let label = matches!(k, CellKind::Input | CellKind::Output)
                        .then(|| label.clone())
                        .flatten();
                    out.set(
                        CellPos {
                            x: t.x * cols + x as u32,
                            y: t.y * rows + y as u32,
                            layer: l as u8,
                        },
                        Cell { kind: k, clock, label },
                    );
                }
            }
        }
    }
    Ok(out)
}
