//! Orthogonal placement and routing on 2DDWave.
//!
//! Every edge is colored east or south so that no vertex has two inputs or
//! two outputs of the same color. Vertices are then placed in topological
//! order: a vertex with one input continues its driver's row (east) or
//! column (south) in a fresh column or row; a vertex with two inputs gets a
//! fresh row and column and collects both inputs with L-shaped runs. Data
//! thus only ever flows east or south, which 2DDWave clocks by construction.
//! Fresh rows and columns keep runs of different edges apart except where a
//! horizontal run passes a vertical one, which becomes a crossing.

use std::sync::Arc;

use thiserror::Error;

use crate::clocking::ClockingScheme;
use crate::layout::{Dir, GateLayout, Layer, LayoutError, Tile};
use crate::network::{EdgeId, LogicNetwork, Op, VertexId};

/// Vertex functions the engine places: no tile takes more than two inputs.
pub const ORTHO_OPS: [Op; 8] = [
    Op::Pi,
    Op::Po,
    Op::And,
    Op::Or,
    Op::Not,
    Op::Fanout,
    Op::Const0,
    Op::Const1,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    East,
    South,
}

impl Color {
    fn flip(self) -> Color {
        match self {
            Color::East => Color::South,
            Color::South => Color::East,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    pub color: Vec<Color>,
}

impl EdgeColoring {
    pub fn get(&self, e: EdgeId) -> Color {
        self.color[e.0]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrthoParams {
    /// Place PIs and POs on tiles; otherwise they become open gate ports.
    pub io_pins: bool,
    /// Extend output wires to the east or south border. Implies pins.
    pub border: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrthoError {
    #[error("vertex {vertex} has {degree} inputs; ortho handles at most 2")]
    InDegree { vertex: VertexId, degree: usize },
    #[error("vertex {vertex} has {degree} outputs; substitute fan-outs first")]
    OutDegree { vertex: VertexId, degree: usize },
    #[error("an input drives an output directly, which needs I/O pins")]
    DirectPinEdge,
    #[error("layout construction failed: {0}")]
    Layout(#[from] LayoutError),
}

fn check_degrees(net: &LogicNetwork) -> Result<(), OrthoError> {
    for v in net.vertices() {
        let ins = net.fanin_edges(v.id).len();
        if ins > 2 {
            return Err(OrthoError::InDegree {
                vertex: v.id,
                degree: ins,
            });
        }
        let outs = net.fanout_edges(v.id).len();
        let limit = if v.op == Op::Fanout { 2 } else { 1 };
        if outs > limit {
            return Err(OrthoError::OutDegree {
                vertex: v.id,
                degree: outs,
            });
        }
    }
    Ok(())
}

/// Two-colors the edges. Edges sharing a target or a source must differ, so
/// the conflicts form paths and even cycles; each component is walked from
/// its lowest edge, which gets east.
pub fn color_edges(net: &LogicNetwork) -> Result<EdgeColoring, OrthoError> {
    check_degrees(net)?;
    let partner = |list: &[EdgeId], e: EdgeId| list.iter().copied().find(|&o| o != e);
    let mut color: Vec<Option<Color>> = vec![None; net.edge_count()];
    for start in net.edges() {
        if color[start.id.0].is_some() {
            continue;
        }
        color[start.id.0] = Some(Color::East);
        let mut stack = vec![start.id];
        while let Some(e) = stack.pop() {
            let c = color[e.0].expect("pushed edges are colored");
            let edge = net.edge(e);
            let neighbors = [
                partner(net.fanin_edges(edge.target), e),
                partner(net.fanout_edges(edge.source), e),
            ];
            for o in neighbors.into_iter().flatten() {
                match color[o.0] {
                    None => {
                        color[o.0] = Some(c.flip());
                        stack.push(o);
                    }
                    Some(oc) => debug_assert_ne!(oc, c, "conflict cycles are even"),
                }
            }
        }
    }
    Ok(EdgeColoring {
        color: color.into_iter().map(|c| c.expect("all edges colored")).collect(),
    })
}

struct Builder {
    tiles: Vec<(Tile, VertexId)>,
    wires: Vec<(Tile, EdgeId, Dir, Dir)>,
    pos: Vec<Option<Tile>>,
    next_row: u32,
    next_col: u32,
}

impl Builder {
    fn row(&mut self) -> u32 {
        self.next_row += 1;
        self.next_row - 1
    }

    fn col(&mut self) -> u32 {
        self.next_col += 1;
        self.next_col - 1
    }

    fn place(&mut self, v: VertexId, t: Tile) {
        self.pos[v.0] = Some(t);
        self.tiles.push((t, v));
    }

    /// Straight wires strictly between `from` and `to`, which share a row
    /// or column with `to` east or south of `from`.
    fn straight(&mut self, e: EdgeId, from: Tile, to: Tile) {
        if from.y == to.y {
            for x in from.x + 1..to.x {
                self.wires.push((Tile::new(x, from.y), e, Dir::W, Dir::E));
            }
        } else {
            for y in from.y + 1..to.y {
                self.wires.push((Tile::new(from.x, y), e, Dir::N, Dir::S));
            }
        }
    }
}

pub fn ortho_layout(net: &LogicNetwork, params: &OrthoParams) -> Result<GateLayout, OrthoError> {
    let coloring = color_edges(net)?;
    let pins = params.io_pins || params.border;
    if !pins
        && net
            .edges()
            .iter()
            .any(|e| net.op(e.source) == Op::Pi && net.op(e.target) == Op::Po)
    {
        return Err(OrthoError::DirectPinEdge);
    }
    let has = |c: Color| {
        net.vertices()
            .iter()
            .any(|v| net.fanin_edges(v.id).is_empty() && out_color(net, &coloring, v.id) == c)
    };
    // row 0 and column 0 host the sources
    let mut b = Builder {
        tiles: Vec::new(),
        wires: Vec::new(),
        pos: vec![None; net.vertex_count()],
        next_row: u32::from(has(Color::South)),
        next_col: u32::from(has(Color::East)),
    };
    for vx in net.vertices() {
        let v = vx.id;
        let ins = net.fanin_edges(v);
        match ins {
            [] => {
                let t = match out_color(net, &coloring, v) {
                    Color::East => Tile::new(0, b.row()),
                    Color::South => Tile::new(b.col(), 0),
                };
                b.place(v, t);
            }
            [e] => {
                let u = b.pos[net.edge(*e).source.0].expect("topological order");
                let t = match coloring.get(*e) {
                    Color::East => Tile::new(b.col(), u.y),
                    Color::South => Tile::new(u.x, b.row()),
                };
                b.straight(*e, u, t);
                b.place(v, t);
            }
            [e1, e2] => {
                let (east, south) = if coloring.get(*e1) == Color::East {
                    (*e1, *e2)
                } else {
                    (*e2, *e1)
                };
                let t = Tile::new(b.col(), b.row());
                let a = b.pos[net.edge(east).source.0].expect("topological order");
                let corner = Tile::new(t.x, a.y);
                b.straight(east, a, corner);
                b.wires.push((corner, east, Dir::W, Dir::S));
                b.straight(east, corner, t);
                let s = b.pos[net.edge(south).source.0].expect("topological order");
                let corner = Tile::new(s.x, t.y);
                b.straight(south, s, corner);
                b.wires.push((corner, south, Dir::N, Dir::E));
                b.straight(south, corner, t);
                b.place(v, t);
            }
            _ => unreachable!("degrees checked"),
        }
    }
    let width = b.next_col.max(1);
    let height = b.next_row.max(1);

    if params.border {
        for &po in net.pos() {
            let t = b.pos[po.0].expect("placed");
            let e = net.fanin_edges(po)[0];
            let target = match coloring.get(e) {
                Color::East => Tile::new(width - 1, t.y),
                Color::South => Tile::new(t.x, height - 1),
            };
            if target != t {
                b.tiles.retain(|&(_, v)| v != po);
                let (entry, exit) = if target.y == t.y {
                    (Dir::W, Dir::E)
                } else {
                    (Dir::N, Dir::S)
                };
                b.wires.push((t, e, entry, exit));
                b.straight(e, t, target);
                b.place(po, target);
            }
        }
    }

    let stripped = |v: VertexId| !pins && net.op(v).is_io();
    b.tiles.retain(|&(_, v)| !stripped(v));
    b.wires.retain(|&(_, e, _, _)| {
        let edge = net.edge(e);
        !stripped(edge.source) && !stripped(edge.target)
    });
    // without pins the source row and column may be empty; a uniform shift
    // keeps every 2DDWave clock difference intact
    let (mut x0, mut y0, mut x1, mut y1) = (0, 0, width - 1, height - 1);
    if !pins {
        let all = || b.tiles.iter().map(|p| p.0).chain(b.wires.iter().map(|w| w.0));
        x0 = all().map(|t| t.x).min().unwrap_or(0);
        y0 = all().map(|t| t.y).min().unwrap_or(0);
        x1 = all().map(|t| t.x).max().unwrap_or(0);
        y1 = all().map(|t| t.y).max().unwrap_or(0);
    }
    let shift = |t: Tile| Tile::new(t.x - x0, t.y - y0);

    let mut layout = GateLayout::new(
        x1 - x0 + 1,
        y1 - y0 + 1,
        ClockingScheme::two_d_d_wave(4),
        Arc::new(net.clone()),
    );
    layout.set_name(net.name());
    for &(t, v) in &b.tiles {
        layout.assign_logic_vertex(shift(t), v)?;
    }
    for &(t, e, entry, exit) in &b.wires {
        let t = shift(t);
        let layer = if layout.wires_at(t).is_empty() {
            Layer::Ground
        } else {
            Layer::Crossing
        };
        layout.assign_wire(t, e, layer, entry, exit)?;
    }
    Ok(layout)
}

fn out_color(net: &LogicNetwork, coloring: &EdgeColoring, v: VertexId) -> Color {
    net.fanout_edges(v).first().map_or(Color::East, |&e| coloring.get(e))
}
