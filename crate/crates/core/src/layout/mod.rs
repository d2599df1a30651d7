//! Tile-based gate-level layouts.
//!
//! The grid itself is implicit (`width` x `height`); vertices, wire
//! segments, clock numbers and latches live in sparse maps that read as
//! "free" for every tile that was never assigned.

mod check;
mod energy;
mod file;
mod sim;
mod stats;
mod timing;
mod wave;

pub use check::{EdgeRoute, Rule, Violation};
pub use energy::{EnergyError, EnergyTable};
pub use file::{LayoutData, LayoutFileError};
pub use sim::SimulationError;
pub use stats::LayoutStats;
pub use timing::{Arrival, Throughput};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clocking::ClockingScheme;
use crate::network::{EdgeId, LogicNetwork, Op, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tile {
    pub x: u32,
    pub y: u32,
}

impl Tile {
    pub const fn new(x: u32, y: u32) -> Self {
        Tile { x, y }
    }

    /// Neighbor in direction `d`, if it stays non-negative. Callers check
    /// the upper bounds.
    pub fn step(self, d: Dir) -> Option<Tile> {
        match d {
            Dir::N => self.y.checked_sub(1).map(|y| Tile::new(self.x, y)),
            Dir::S => Some(Tile::new(self.x, self.y + 1)),
            Dir::E => Some(Tile::new(self.x + 1, self.y)),
            Dir::W => self.x.checked_sub(1).map(|x| Tile::new(x, self.y)),
        }
    }

    /// Direction from `self` to an adjacent tile.
    pub fn dir_to(self, other: Tile) -> Option<Dir> {
        Dir::ALL.into_iter().find(|&d| self.step(d) == Some(other))
    }

    pub fn is_adjacent(self, other: Tile) -> bool {
        self.dir_to(other).is_some()
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Tile side / signal direction. North is up (decreasing y).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];

    pub fn opposite(self) -> Dir {
        match self {
            Dir::N => Dir::S,
            Dir::S => Dir::N,
            Dir::E => Dir::W,
            Dir::W => Dir::E,
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Dir::E | Dir::W)
    }

    /// Quarter turn clockwise.
    pub fn rotate_cw(self) -> Dir {
        match self {
            Dir::N => Dir::E,
            Dir::E => Dir::S,
            Dir::S => Dir::W,
            Dir::W => Dir::N,
        }
    }

    /// Reflection across the vertical axis (swaps east and west).
    pub fn mirror(self) -> Dir {
        match self {
            Dir::E => Dir::W,
            Dir::W => Dir::E,
            d => d,
        }
    }

    /// Reflection across the main diagonal (swaps x and y).
    pub fn transpose(self) -> Dir {
        match self {
            Dir::N => Dir::W,
            Dir::W => Dir::N,
            Dir::S => Dir::E,
            Dir::E => Dir::S,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Dir::N => 'N',
            Dir::E => 'E',
            Dir::S => 'S',
            Dir::W => 'W',
        }
    }

    pub fn from_letter(c: char) -> Option<Dir> {
        match c.to_ascii_uppercase() {
            'N' => Some(Dir::N),
            'E' => Some(Dir::E),
            'S' => Some(Dir::S),
            'W' => Some(Dir::W),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Ground,
    Crossing,
}

/// One wire passing through a tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub edge: EdgeId,
    pub layer: Layer,
    /// Side the signal enters through.
    pub entry: Dir,
    /// Side the signal leaves through.
    pub exit: Dir,
}

impl Segment {
    pub fn is_straight(&self) -> bool {
        self.entry == self.exit.opposite()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("tile {0} is outside the layout")]
    OutOfBounds(Tile),
    #[error("tile {0} is occupied")]
    Occupied(Tile),
    #[error("vertex {0} is already placed")]
    AlreadyPlaced(VertexId),
    #[error("vertex {0} does not exist in the network")]
    UnknownVertex(VertexId),
    #[error("edge {0} does not exist in the network")]
    UnknownEdge(EdgeId),
    #[error("layer {layer:?} of tile {tile} is already used")]
    SlotConflict { tile: Tile, layer: Layer },
    #[error("second wire on tile {0} does not cross the first perpendicularly")]
    NotPerpendicular(Tile),
    #[error("tile {0} holds a logic vertex")]
    VertexTile(Tile),
    #[error("wire on tile {0} enters and leaves through the same side")]
    SameSide(Tile),
    #[error("clock number {clock} is not below {phases}")]
    ClockRange { clock: u8, phases: u8 },
    #[error("clock numbers of regular schemes are fixed")]
    FixedClock,
    #[error("invalid layout: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug)]
pub struct GateLayout {
    name: String,
    width: u32,
    height: u32,
    scheme: ClockingScheme,
    network: Arc<LogicNetwork>,
    allow_crossings: bool,
    vertex_at: BTreeMap<Tile, VertexId>,
    tile_of: Vec<Option<Tile>>,
    wires_at: BTreeMap<Tile, Vec<Segment>>,
    clock_at: BTreeMap<Tile, u8>,
    latch_at: BTreeMap<Tile, u8>,
    pi_tiles: BTreeSet<Tile>,
    po_tiles: BTreeSet<Tile>,
}

impl GateLayout {
    pub fn new(width: u32, height: u32, scheme: ClockingScheme, network: Arc<LogicNetwork>) -> Self {
        GateLayout {
            name: network.name().to_string(),
            width,
            height,
            scheme,
            tile_of: vec![None; network.vertex_count()],
            network,
            allow_crossings: true,
            vertex_at: BTreeMap::new(),
            wires_at: BTreeMap::new(),
            clock_at: BTreeMap::new(),
            latch_at: BTreeMap::new(),
            pi_tiles: BTreeSet::new(),
            po_tiles: BTreeSet::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    pub fn scheme(&self) -> &ClockingScheme {
        &self.scheme
    }

    pub fn network(&self) -> &Arc<LogicNetwork> {
        &self.network
    }

    pub fn allow_crossings(&self) -> bool {
        self.allow_crossings
    }

    pub fn set_allow_crossings(&mut self, allow: bool) {
        self.allow_crossings = allow;
    }

    pub fn in_bounds(&self, t: Tile) -> bool {
        t.x < self.width && t.y < self.height
    }

    /// Neighbor of `t` in direction `d` inside the grid.
    pub fn neighbor(&self, t: Tile, d: Dir) -> Option<Tile> {
        t.step(d).filter(|&n| self.in_bounds(n))
    }

    pub fn is_border(&self, t: Tile) -> bool {
        t.x == 0 || t.y == 0 || t.x + 1 == self.width || t.y + 1 == self.height
    }

    fn check_bounds(&self, t: Tile) -> Result<(), LayoutError> {
        if self.in_bounds(t) {
            Ok(())
        } else {
            Err(LayoutError::OutOfBounds(t))
        }
    }

    /// Places `v` on `t`. PI and PO vertices mark their tile as pin tile.
    pub fn assign_logic_vertex(&mut self, t: Tile, v: VertexId) -> Result<(), LayoutError> {
        self.check_bounds(t)?;
        if v.0 >= self.network.vertex_count() {
            return Err(LayoutError::UnknownVertex(v));
        }
        if !self.is_free_tile(t) {
            return Err(LayoutError::Occupied(t));
        }
        if self.tile_of[v.0].is_some() {
            return Err(LayoutError::AlreadyPlaced(v));
        }
        self.vertex_at.insert(t, v);
        self.tile_of[v.0] = Some(t);
        match self.network.op(v) {
            Op::Pi => {
                self.pi_tiles.insert(t);
            }
            Op::Po => {
                self.po_tiles.insert(t);
            }
            _ => {}
        }
        Ok(())
    }

    /// Removes the vertex on `t`, if any.
    pub fn remove_vertex(&mut self, t: Tile) -> Option<VertexId> {
        let v = self.vertex_at.remove(&t)?;
        self.tile_of[v.0] = None;
        self.pi_tiles.remove(&t);
        self.po_tiles.remove(&t);
        Some(v)
    }

    /// Adds a wire segment of `edge` to tile `t`.
    pub fn assign_wire(
        &mut self,
        t: Tile,
        edge: EdgeId,
        layer: Layer,
        entry: Dir,
        exit: Dir,
    ) -> Result<(), LayoutError> {
        self.check_bounds(t)?;
        if edge.0 >= self.network.edge_count() {
            return Err(LayoutError::UnknownEdge(edge));
        }
        if self.vertex_at.contains_key(&t) {
            return Err(LayoutError::VertexTile(t));
        }
        if entry == exit {
            return Err(LayoutError::SameSide(t));
        }
        let seg = Segment {
            edge,
            layer,
            entry,
            exit,
        };
        let segs = self.wires_at.entry(t).or_default();
        if segs.iter().any(|s| s.layer == layer) || segs.len() >= 2 {
            return Err(LayoutError::SlotConflict { tile: t, layer });
        }
        if let Some(first) = segs.first() {
            let crosses =
                first.is_straight() && seg.is_straight() && first.entry.is_horizontal() != seg.entry.is_horizontal();
            if !crosses {
                return Err(LayoutError::NotPerpendicular(t));
            }
        }
        segs.push(seg);
        Ok(())
    }

    /// Removes all wire segments of `edge`.
    pub fn remove_edge_wires(&mut self, edge: EdgeId) {
        self.wires_at.retain(|_, segs| {
            segs.retain(|s| s.edge != edge);
            !segs.is_empty()
        });
        // a lone survivor of a crossing moves back to the ground layer
        for segs in self.wires_at.values_mut() {
            if segs.len() == 1 {
                segs[0].layer = Layer::Ground;
            }
        }
        let wires = &self.wires_at;
        let vertices = &self.vertex_at;
        self.latch_at
            .retain(|t, _| wires.contains_key(t) || vertices.contains_key(t));
    }

    /// Sets the clock number of a tile (open schemes only).
    pub fn assign_clock(&mut self, t: Tile, clock: u8) -> Result<(), LayoutError> {
        self.check_bounds(t)?;
        if self.scheme.is_regular() {
            return Err(LayoutError::FixedClock);
        }
        if clock >= self.scheme.phases {
            return Err(LayoutError::ClockRange {
                clock,
                phases: self.scheme.phases,
            });
        }
        self.clock_at.insert(t, clock);
        Ok(())
    }

    /// Turns tile `t` into a synchronization element holding its value for
    /// `delay` extra phases. A delay of 0 removes the latch.
    pub fn assign_latch(&mut self, t: Tile, delay: u8) -> Result<(), LayoutError> {
        self.check_bounds(t)?;
        if delay >= self.scheme.phases {
            return Err(LayoutError::ClockRange {
                clock: delay,
                phases: self.scheme.phases,
            });
        }
        if delay == 0 {
            self.latch_at.remove(&t);
        } else {
            self.latch_at.insert(t, delay);
        }
        Ok(())
    }

    /// Clock number of `t`: from the scheme if regular, else the assigned one.
    pub fn clock(&self, t: Tile) -> Option<u8> {
        self.scheme.clock_number(t).or_else(|| self.clock_at.get(&t).copied())
    }

    pub fn latch(&self, t: Tile) -> u8 {
        self.latch_at.get(&t).copied().unwrap_or(0)
    }

    pub fn vertex_at(&self, t: Tile) -> Option<VertexId> {
        self.vertex_at.get(&t).copied()
    }

    pub fn tile_of(&self, v: VertexId) -> Option<Tile> {
        self.tile_of[v.0]
    }

    pub fn wires_at(&self, t: Tile) -> &[Segment] {
        self.wires_at.get(&t).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_free_tile(&self, t: Tile) -> bool {
        !self.vertex_at.contains_key(&t) && !self.wires_at.contains_key(&t)
    }

    /// Uniformly sampled tile of the grid.
    pub fn random_tile<R: Rng + ?Sized>(&self, rng: &mut R) -> Tile {
        assert!(self.width > 0 && self.height > 0, "layout has no tiles");
        Tile::new(rng.gen_range(0..self.width), rng.gen_range(0..self.height))
    }

    pub fn placed_vertices(&self) -> impl Iterator<Item = (Tile, VertexId)> + '_ {
        self.vertex_at.iter().map(|(&t, &v)| (t, v))
    }

    pub fn wire_tiles(&self) -> impl Iterator<Item = (Tile, &[Segment])> + '_ {
        self.wires_at.iter().map(|(&t, s)| (t, s.as_slice()))
    }

    pub fn latches(&self) -> impl Iterator<Item = (Tile, u8)> + '_ {
        self.latch_at.iter().map(|(&t, &d)| (t, d))
    }

    pub fn assigned_clocks(&self) -> impl Iterator<Item = (Tile, u8)> + '_ {
        self.clock_at.iter().map(|(&t, &z)| (t, z))
    }

    /// All tiles holding a vertex or a wire, in ascending order.
    pub fn occupied_tiles(&self) -> BTreeSet<Tile> {
        self.vertex_at.keys().chain(self.wires_at.keys()).copied().collect()
    }

    pub fn pi_tiles(&self) -> &BTreeSet<Tile> {
        &self.pi_tiles
    }

    pub fn po_tiles(&self) -> &BTreeSet<Tile> {
        &self.po_tiles
    }

    pub fn all_tiles(&self) -> impl Iterator<Item = Tile> {
        let (w, h) = (self.width, self.height);
        (0..h).flat_map(move |y| (0..w).map(move |x| Tile::new(x, y)))
    }

    /// Changes the grid size. Shrinking below an occupied tile fails.
    pub fn resize(&mut self, width: u32, height: u32) -> Result<(), LayoutError> {
        let keeps = |t: &Tile| t.x < width && t.y < height;
        if let Some(t) = self.occupied_tiles().into_iter().find(|t| !keeps(t)) {
            return Err(LayoutError::OutOfBounds(t));
        }
        self.width = width;
        self.height = height;
        self.clock_at.retain(|t, _| keeps(t));
        Ok(())
    }

    /// Mirrors the layout across its main diagonal, swapping x and y and
    /// relabeling directions accordingly. The clocking scheme is kept, so
    /// the result is only equivalent for schemes symmetric under
    /// transposition such as 2DDWave.
    pub fn transpose(&self) -> GateLayout {
        let tr = |t: &Tile| Tile::new(t.y, t.x);
        let mut out = GateLayout::new(self.height, self.width, self.scheme.clone(), self.network.clone());
        out.name = self.name.clone();
        out.allow_crossings = self.allow_crossings;
        for (t, v) in self.placed_vertices() {
            out.assign_logic_vertex(tr(&t), v).expect("transposed tile is free");
        }
        for (t, segs) in self.wire_tiles() {
            for s in segs {
                out.wires_at.entry(tr(&t)).or_default().push(Segment {
                    entry: s.entry.transpose(),
                    exit: s.exit.transpose(),
                    ..*s
                });
            }
        }
        out.clock_at = self.clock_at.iter().map(|(t, &z)| (tr(t), z)).collect();
        out.latch_at = self.latch_at.iter().map(|(t, &d)| (tr(t), d)).collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkBuilder;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn and_net() -> Arc<LogicNetwork> {
        let mut b = NetworkBuilder::new("and");
        let a = b.add_pi("a");
        let c = b.add_pi("b");
        let g = b.add_gate(Op::And, &[a, c]).unwrap();
        b.add_po("y", g).unwrap();
        Arc::new(b.build())
    }

    fn empty(w: u32, h: u32) -> GateLayout {
        GateLayout::new(w, h, ClockingScheme::two_d_d_wave(4), and_net())
    }

    #[test]
    fn placing_vertices() {
        let mut l = empty(3, 3);
        assert!(l.all_tiles().all(|t| l.is_free_tile(t)));
        l.assign_logic_vertex(Tile::new(1, 1), VertexId(2)).unwrap();
        assert!(!l.is_free_tile(Tile::new(1, 1)));
        assert_eq!(l.all_tiles().filter(|&t| !l.is_free_tile(t)).count(), 1);
        assert_eq!(
            l.assign_logic_vertex(Tile::new(1, 1), VertexId(0)),
            Err(LayoutError::Occupied(Tile::new(1, 1)))
        );
        assert_eq!(
            l.assign_logic_vertex(Tile::new(0, 0), VertexId(2)),
            Err(LayoutError::AlreadyPlaced(VertexId(2)))
        );
        assert_eq!(
            l.assign_logic_vertex(Tile::new(3, 0), VertexId(0)),
            Err(LayoutError::OutOfBounds(Tile::new(3, 0)))
        );
        l.assign_logic_vertex(Tile::new(0, 1), VertexId(0)).unwrap();
        assert!(l.pi_tiles().contains(&Tile::new(0, 1)));
    }

    #[test]
    fn random_placement_of_all_vertices() {
        let net = and_net();
        let n = net.vertex_count() as u32;
        let mut l = GateLayout::new(n, n, ClockingScheme::from_name("use").unwrap(), net.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for v in net.vertices() {
            loop {
                let t = l.random_tile(&mut rng);
                if l.is_free_tile(t) {
                    l.assign_logic_vertex(t, v.id).unwrap();
                    break;
                }
            }
        }
        assert_eq!(l.placed_vertices().count(), 4);
        let tiles: BTreeSet<Tile> = l.placed_vertices().map(|(t, _)| t).collect();
        assert_eq!(tiles.len(), 4);
    }

    #[test]
    fn random_tiles_are_deterministic() {
        let l = empty(5, 4);
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        let a: Vec<Tile> = (0..32).map(|_| l.random_tile(&mut r1)).collect();
        let b: Vec<Tile> = (0..32).map(|_| l.random_tile(&mut r2)).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|&t| l.in_bounds(t)));
    }

    #[test]
    fn wire_rules() {
        let mut l = empty(3, 3);
        let t = Tile::new(1, 0);
        l.assign_wire(t, EdgeId(0), Layer::Ground, Dir::W, Dir::E).unwrap();
        assert_eq!(l.wires_at(t).len(), 1);
        // parallel second wire is rejected
        assert_eq!(
            l.assign_wire(t, EdgeId(1), Layer::Crossing, Dir::E, Dir::W),
            Err(LayoutError::NotPerpendicular(t))
        );
        assert_eq!(
            l.assign_wire(t, EdgeId(1), Layer::Ground, Dir::N, Dir::S),
            Err(LayoutError::SlotConflict {
                tile: t,
                layer: Layer::Ground
            })
        );
        l.assign_wire(t, EdgeId(1), Layer::Crossing, Dir::N, Dir::S).unwrap();
        assert_eq!(l.wires_at(t).len(), 2);
        assert_eq!(
            l.assign_wire(Tile::new(0, 0), EdgeId(0), Layer::Ground, Dir::W, Dir::W),
            Err(LayoutError::SameSide(Tile::new(0, 0)))
        );
        l.assign_logic_vertex(Tile::new(2, 2), VertexId(2)).unwrap();
        assert_eq!(
            l.assign_wire(Tile::new(2, 2), EdgeId(0), Layer::Ground, Dir::W, Dir::E),
            Err(LayoutError::VertexTile(Tile::new(2, 2)))
        );
        l.remove_edge_wires(EdgeId(0));
        assert_eq!(l.wires_at(t)[0].layer, Layer::Ground);
    }

    #[test]
    fn corner_wires_cannot_share() {
        let mut l = empty(3, 3);
        let t = Tile::new(1, 1);
        l.assign_wire(t, EdgeId(0), Layer::Ground, Dir::W, Dir::S).unwrap();
        assert_eq!(
            l.assign_wire(t, EdgeId(1), Layer::Crossing, Dir::N, Dir::E),
            Err(LayoutError::NotPerpendicular(t))
        );
    }

    #[test]
    fn clocks() {
        let mut l = empty(3, 3);
        assert_eq!(l.clock(Tile::new(2, 1)), Some(3));
        assert_eq!(l.assign_clock(Tile::new(0, 0), 1), Err(LayoutError::FixedClock));
        let mut open = GateLayout::new(2, 2, ClockingScheme::open(4), and_net());
        assert_eq!(open.clock(Tile::new(1, 1)), None);
        open.assign_clock(Tile::new(1, 1), 2).unwrap();
        assert_eq!(open.clock(Tile::new(1, 1)), Some(2));
        assert!(open.assign_clock(Tile::new(1, 1), 4).is_err());
    }
}
