//! Well-formedness rules and edge route tracing.

use std::collections::BTreeMap;
use std::fmt;

use super::{Dir, GateLayout, Layer, Tile};
use crate::network::{EdgeId, Op, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Every edge is realized by a contiguous path.
    Connectivity,
    /// Clock numbers advance by one (plus latch delay) per hop.
    Clocking,
    /// Port directions respect the vertex arity.
    Arity,
    /// Tile capacity and crossing rules.
    Crossing,
    /// Pin tiles host pin vertices.
    Pins,
    /// Open schemes assign a clock to every used tile.
    ClockAssigned,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::Connectivity => "R1",
            Rule::Clocking => "R2",
            Rule::Arity => "R3",
            Rule::Crossing => "R4",
            Rule::Pins => "R5",
            Rule::ClockAssigned => "R6",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub tile: Option<Tile>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tile {
            Some(t) => write!(f, "{} at {}: {}", self.rule.id(), t, self.message),
            None => write!(f, "{}: {}", self.rule.id(), self.message),
        }
    }
}

/// The tiles realizing one network edge. `source`/`target` are `None` for
/// unplaced (implicit) pins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRoute {
    pub edge: EdgeId,
    pub source: Option<Tile>,
    pub wires: Vec<Tile>,
    pub target: Option<Tile>,
}

impl EdgeRoute {
    /// Endpoint and wire tiles in signal order.
    pub fn tiles(&self) -> impl Iterator<Item = Tile> + '_ {
        self.source
            .into_iter()
            .chain(self.wires.iter().copied())
            .chain(self.target)
    }

    /// Side of the source tile the signal leaves through.
    pub fn out_side(&self) -> Option<Dir> {
        let s = self.source?;
        let next = self.wires.first().copied().or(self.target)?;
        s.dir_to(next)
    }

    /// Side of the target tile the signal enters through.
    pub fn in_side(&self) -> Option<Dir> {
        let t = self.target?;
        let prev = self.wires.last().copied().or(self.source)?;
        t.dir_to(prev)
    }
}

fn violation(rule: Rule, tile: Option<Tile>, message: impl Into<String>) -> Violation {
    Violation {
        rule,
        tile,
        message: message.into(),
    }
}

impl GateLayout {
    /// Implicit endpoints are unplaced PIs (as sources) and POs (as targets).
    fn is_implicit(&self, v: VertexId) -> bool {
        self.tile_of(v).is_none() && self.network.op(v).is_io()
    }

    fn wire_index(&self) -> BTreeMap<EdgeId, Vec<Tile>> {
        let mut idx: BTreeMap<EdgeId, Vec<Tile>> = BTreeMap::new();
        for (t, segs) in self.wire_tiles() {
            for s in segs {
                idx.entry(s.edge).or_default().push(t);
            }
        }
        idx
    }

    fn segment_of(&self, t: Tile, e: EdgeId) -> Option<&super::Segment> {
        self.wires_at(t).iter().find(|s| s.edge == e)
    }

    fn trace(&self, e: EdgeId, wire_tiles: &[Tile]) -> Result<EdgeRoute, Violation> {
        let edge = self.network.edge(e);
        let (u, v) = (edge.source, edge.target);
        let src = self.tile_of(u);
        let dst = self.tile_of(v);
        let implicit_src = self.is_implicit(u) && self.network.op(u) == Op::Pi;
        let implicit_dst = self.is_implicit(v) && self.network.op(v) == Op::Po;
        let route = |wires| EdgeRoute {
            edge: e,
            source: src,
            wires,
            target: dst,
        };
        match (src, dst) {
            (Some(s), Some(d)) => {
                if wire_tiles.is_empty() {
                    return if s.is_adjacent(d) {
                        Ok(route(Vec::new()))
                    } else {
                        Err(violation(
                            Rule::Connectivity,
                            Some(s),
                            format!("edge {e} to {d} has no wires and the tiles are not adjacent"),
                        ))
                    };
                }
                let first = wire_tiles
                    .iter()
                    .copied()
                    .find(|&w| self.segment_of(w, e).and_then(|seg| w.step(seg.entry)) == Some(s))
                    .ok_or_else(|| {
                        violation(
                            Rule::Connectivity,
                            Some(s),
                            format!("no wire of edge {e} leaves the source"),
                        )
                    })?;
                let mut wires = vec![first];
                let mut cur = first;
                loop {
                    let seg = self.segment_of(cur, e).expect("indexed tile holds the edge");
                    let next = cur.step(seg.exit).filter(|&n| self.in_bounds(n)).ok_or_else(|| {
                        violation(Rule::Connectivity, Some(cur), format!("edge {e} leaves the layout"))
                    })?;
                    if next == d {
                        break;
                    }
                    let continues = self
                        .segment_of(next, e)
                        .is_some_and(|ns| ns.entry == seg.exit.opposite());
                    if !continues || wires.len() > wire_tiles.len() {
                        return Err(violation(
                            Rule::Connectivity,
                            Some(cur),
                            format!("edge {e} is interrupted after this tile"),
                        ));
                    }
                    wires.push(next);
                    cur = next;
                }
                if wires.len() != wire_tiles.len() {
                    return Err(violation(
                        Rule::Connectivity,
                        Some(d),
                        format!("edge {e} has {} stray wire segments", wire_tiles.len() - wires.len()),
                    ));
                }
                Ok(route(wires))
            }
            (None, None) if implicit_src && implicit_dst => Err(violation(
                Rule::Connectivity,
                None,
                format!("edge {e} joins two unplaced pins"),
            )),
            (None, _) if !implicit_src => Err(violation(
                Rule::Connectivity,
                None,
                format!("vertex {u} ({}) is not placed", self.network.op(u)),
            )),
            (_, None) if !implicit_dst => Err(violation(
                Rule::Connectivity,
                None,
                format!("vertex {v} ({}) is not placed", self.network.op(v)),
            )),
            _ => {
                if wire_tiles.is_empty() {
                    Ok(route(Vec::new()))
                } else {
                    Err(violation(
                        Rule::Connectivity,
                        Some(wire_tiles[0]),
                        format!("edge {e} of an unplaced pin carries wires"),
                    ))
                }
            }
        }
    }

    /// Traces every edge of the network. Fails with the connectivity
    /// violations if any edge cannot be traced.
    pub fn routes(&self) -> Result<Vec<EdgeRoute>, Vec<Violation>> {
        let idx = self.wire_index();
        let mut routes = Vec::with_capacity(self.network.edge_count());
        let mut errors = Vec::new();
        for edge in self.network.edges() {
            let tiles = idx.get(&edge.id).map(Vec::as_slice).unwrap_or(&[]);
            match self.trace(edge.id, tiles) {
                Ok(r) => routes.push(r),
                Err(v) => errors.push(v),
            }
        }
        if errors.is_empty() {
            Ok(routes)
        } else {
            Err(errors)
        }
    }

    /// Checks all well-formedness rules; an empty list means valid.
    pub fn check_validity(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.check_tiles(&mut out);
        self.check_pins(&mut out);
        self.check_clocks_assigned(&mut out);
        let clocks_known = !out.iter().any(|v| v.rule == Rule::ClockAssigned);
        match self.routes() {
            Ok(routes) => {
                if clocks_known {
                    self.check_clocking(&routes, &mut out);
                }
                self.check_arity(&routes, &mut out);
            }
            Err(errs) => out.extend(errs),
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.check_validity().is_empty()
    }

    fn check_tiles(&self, out: &mut Vec<Violation>) {
        for t in self.occupied_tiles() {
            if !self.in_bounds(t) {
                out.push(violation(Rule::Crossing, Some(t), "tile outside the layout"));
            }
        }
        for (t, segs) in self.wire_tiles() {
            if self.vertex_at(t).is_some() {
                out.push(violation(Rule::Crossing, Some(t), "wire on a vertex tile"));
            }
            for s in segs {
                if s.entry == s.exit {
                    out.push(violation(Rule::Crossing, Some(t), "wire enters and leaves on one side"));
                }
            }
            match segs {
                [s] if s.layer != Layer::Ground => {
                    out.push(violation(Rule::Crossing, Some(t), "single wire off the ground layer"));
                }
                [a, b] => {
                    if !self.allow_crossings {
                        out.push(violation(Rule::Crossing, Some(t), "crossings are disabled"));
                    }
                    if a.layer == b.layer {
                        out.push(violation(Rule::Crossing, Some(t), "crossing wires share a layer"));
                    }
                    if a.edge == b.edge {
                        out.push(violation(Rule::Crossing, Some(t), "edge crosses itself"));
                    }
                    let perpendicular =
                        a.is_straight() && b.is_straight() && a.entry.is_horizontal() != b.entry.is_horizontal();
                    if !perpendicular {
                        out.push(violation(
                            Rule::Crossing,
                            Some(t),
                            "crossing wires are not perpendicular",
                        ));
                    }
                }
                s if s.len() > 2 => {
                    out.push(violation(Rule::Crossing, Some(t), "more than two wires"));
                }
                _ => {}
            }
        }
        for (t, d) in self.latches() {
            if self.wires_at(t).len() != 1 {
                out.push(violation(
                    Rule::Crossing,
                    Some(t),
                    "latch on a tile without exactly one wire",
                ));
            }
            if d >= self.scheme.phases {
                out.push(violation(
                    Rule::Clocking,
                    Some(t),
                    "latch delay not below the phase count",
                ));
            }
        }
    }

    fn check_pins(&self, out: &mut Vec<Violation>) {
        for &t in self.pi_tiles() {
            if self.vertex_at(t).map(|v| self.network.op(v)) != Some(Op::Pi) {
                out.push(violation(Rule::Pins, Some(t), "PI tile without a PI vertex"));
            }
        }
        for &t in self.po_tiles() {
            if self.vertex_at(t).map(|v| self.network.op(v)) != Some(Op::Po) {
                out.push(violation(Rule::Pins, Some(t), "PO tile without a PO vertex"));
            }
        }
        for (t, v) in self.placed_vertices() {
            let marked = match self.network.op(v) {
                Op::Pi => self.pi_tiles().contains(&t),
                Op::Po => self.po_tiles().contains(&t),
                _ => true,
            };
            if !marked {
                out.push(violation(Rule::Pins, Some(t), "pin vertex on an unmarked tile"));
            }
        }
    }

    fn check_clocks_assigned(&self, out: &mut Vec<Violation>) {
        if self.scheme.is_regular() {
            return;
        }
        for t in self.occupied_tiles() {
            if self.clock(t).is_none() {
                out.push(violation(Rule::ClockAssigned, Some(t), "used tile has no clock"));
            }
        }
    }

    fn check_clocking(&self, routes: &[EdgeRoute], out: &mut Vec<Violation>) {
        let n = self.scheme.phases as u32;
        for r in routes {
            let tiles: Vec<Tile> = r.tiles().collect();
            for w in tiles.windows(2) {
                let (a, b) = (w[0], w[1]);
                let (Some(za), Some(zb)) = (self.clock(a), self.clock(b)) else {
                    continue;
                };
                let expect = (za as u32 + 1 + self.latch(a) as u32) % n;
                if zb as u32 != expect {
                    out.push(violation(
                        Rule::Clocking,
                        Some(b),
                        format!("edge {} steps from clock {za} to {zb}, expected {expect}", r.edge),
                    ));
                }
            }
        }
    }

    fn check_arity(&self, routes: &[EdgeRoute], out: &mut Vec<Violation>) {
        let by_edge: BTreeMap<EdgeId, &EdgeRoute> = routes.iter().map(|r| (r.edge, r)).collect();
        for (t, v) in self.placed_vertices() {
            let mut ins = Vec::new();
            let mut outs = Vec::new();
            let mut implicit = 0;
            for &e in self.network.fanin_edges(v) {
                match by_edge[&e].in_side() {
                    Some(d) => ins.push(d),
                    None => implicit += 1,
                }
            }
            for &e in self.network.fanout_edges(v) {
                match by_edge[&e].out_side() {
                    Some(d) => outs.push(d),
                    None => implicit += 1,
                }
            }
            let mut sides: Vec<Dir> = ins.iter().chain(&outs).copied().collect();
            let explicit = sides.len();
            sides.sort();
            sides.dedup();
            if sides.len() != explicit {
                out.push(violation(Rule::Arity, Some(t), "two ports share a tile side"));
            } else if explicit + implicit > 4 {
                out.push(violation(Rule::Arity, Some(t), "more ports than tile sides"));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clocking::ClockingScheme;
    use crate::network::{LogicNetwork, NetworkBuilder};
    use std::sync::Arc;

    fn chain() -> Arc<LogicNetwork> {
        let mut b = NetworkBuilder::new("buf");
        let a = b.add_pi("a");
        b.add_po("y", a).unwrap();
        Arc::new(b.build())
    }

    fn line(w: u32) -> GateLayout {
        // PI -> wire... -> PO along row 0 on 2DDWave
        let mut l = GateLayout::new(w, 1, ClockingScheme::two_d_d_wave(4), chain());
        l.assign_logic_vertex(Tile::new(0, 0), VertexId(0)).unwrap();
        l.assign_logic_vertex(Tile::new(w - 1, 0), VertexId(1)).unwrap();
        for x in 1..w - 1 {
            l.assign_wire(Tile::new(x, 0), EdgeId(0), Layer::Ground, Dir::W, Dir::E)
                .unwrap();
        }
        l
    }

    #[test]
    fn empty_layout_of_empty_network_is_valid() {
        let net = Arc::new(NetworkBuilder::new("empty").build());
        let l = GateLayout::new(3, 3, ClockingScheme::two_d_d_wave(4), net);
        assert!(l.check_validity().is_empty());
    }

    #[test]
    fn straight_line_is_valid() {
        let l = line(3);
        assert_eq!(l.check_validity(), vec![]);
        let routes = l.routes().unwrap();
        assert_eq!(routes[0].wires, vec![Tile::new(1, 0)]);
        assert_eq!(routes[0].out_side(), Some(Dir::E));
        assert_eq!(routes[0].in_side(), Some(Dir::W));
    }

    #[test]
    fn clock_skip_is_reported() {
        let mut l = GateLayout::new(2, 1, ClockingScheme::open(4), chain());
        l.assign_logic_vertex(Tile::new(0, 0), VertexId(0)).unwrap();
        l.assign_logic_vertex(Tile::new(1, 0), VertexId(1)).unwrap();
        l.assign_clock(Tile::new(0, 0), 0).unwrap();
        l.assign_clock(Tile::new(1, 0), 2).unwrap();
        let v = l.check_validity();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::Clocking);
        l.assign_clock(Tile::new(1, 0), 1).unwrap();
        assert!(l.is_valid());
    }

    #[test]
    fn missing_clock_is_reported() {
        let mut l = GateLayout::new(2, 1, ClockingScheme::open(4), chain());
        l.assign_logic_vertex(Tile::new(0, 0), VertexId(0)).unwrap();
        l.assign_logic_vertex(Tile::new(1, 0), VertexId(1)).unwrap();
        l.assign_clock(Tile::new(0, 0), 0).unwrap();
        assert!(l.check_validity().iter().any(|v| v.rule == Rule::ClockAssigned));
    }

    #[test]
    fn broken_wire_is_reported() {
        let mut l = GateLayout::new(4, 1, ClockingScheme::two_d_d_wave(4), chain());
        l.assign_logic_vertex(Tile::new(0, 0), VertexId(0)).unwrap();
        l.assign_logic_vertex(Tile::new(3, 0), VertexId(1)).unwrap();
        l.assign_wire(Tile::new(1, 0), EdgeId(0), Layer::Ground, Dir::W, Dir::E)
            .unwrap();
        let v = l.check_validity();
        assert!(v.iter().any(|v| v.rule == Rule::Connectivity), "{v:?}");
    }

    #[test]
    fn unplaced_gate_is_reported() {
        let mut b = NetworkBuilder::new("inv");
        let a = b.add_pi("a");
        let n = b.add_gate(Op::Not, &[a]).unwrap();
        b.add_po("y", n).unwrap();
        let l = GateLayout::new(2, 2, ClockingScheme::two_d_d_wave(4), Arc::new(b.build()));
        assert!(l.check_validity().iter().any(|v| v.rule == Rule::Connectivity));
    }

    #[test]
    fn latch_shifts_clock() {
        let mut l = GateLayout::new(3, 1, ClockingScheme::open(4), chain());
        l.assign_logic_vertex(Tile::new(0, 0), VertexId(0)).unwrap();
        l.assign_logic_vertex(Tile::new(2, 0), VertexId(1)).unwrap();
        l.assign_wire(Tile::new(1, 0), EdgeId(0), Layer::Ground, Dir::W, Dir::E)
            .unwrap();
        l.assign_clock(Tile::new(0, 0), 0).unwrap();
        l.assign_clock(Tile::new(1, 0), 1).unwrap();
        l.assign_clock(Tile::new(2, 0), 0).unwrap();
        assert!(!l.is_valid());
        l.assign_latch(Tile::new(1, 0), 2).unwrap();
        assert_eq!(l.check_validity(), vec![]);
    }

    #[test]
    fn disabled_crossings_are_reported() {
        let mut b = NetworkBuilder::new("x");
        let a = b.add_pi("a");
        let c = b.add_pi("c");
        b.add_po("ya", a).unwrap();
        b.add_po("yc", c).unwrap();
        let mut l = GateLayout::new(3, 3, ClockingScheme::two_d_d_wave(4), Arc::new(b.build()));
        // a: (0,1) -> (1,1) -> (2,1); c: (1,0) -> (1,1) -> (1,2)
        l.assign_logic_vertex(Tile::new(0, 1), VertexId(0)).unwrap();
        l.assign_logic_vertex(Tile::new(1, 0), VertexId(1)).unwrap();
        l.assign_logic_vertex(Tile::new(2, 1), VertexId(2)).unwrap();
        l.assign_logic_vertex(Tile::new(1, 2), VertexId(3)).unwrap();
        l.assign_wire(Tile::new(1, 1), EdgeId(0), Layer::Ground, Dir::W, Dir::E)
            .unwrap();
        l.assign_wire(Tile::new(1, 1), EdgeId(1), Layer::Crossing, Dir::N, Dir::S)
            .unwrap();
        assert_eq!(l.check_validity(), vec![]);
        l.set_allow_crossings(false);
        assert_eq!(l.check_validity()[0].rule, Rule::Crossing);
    }
}
