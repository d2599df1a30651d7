//! Functional simulation of a layout.
//!
//! Signals are followed geometrically: a wire segment reads whatever sits
//! behind its entry side, so a misrouted wire shows up as a wrong value
//! rather than being trusted from its edge label. Only the final hop into a
//! vertex uses the edge label, to tell the vertex's input ports apart.

use std::collections::VecDeque;

use thiserror::Error;

use super::{GateLayout, Tile};
use crate::network::{EdgeId, Op, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimulationError {
    #[error("expected {expected} input values, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("input {port} of vertex {vertex} is not driven")]
    Undriven { vertex: VertexId, port: usize },
    #[error("wire on tile {0} is not driven")]
    OpenWire(Tile),
    #[error("vertex {0} is not placed")]
    Unplaced(VertexId),
    #[error("tile {0} has no clock")]
    NoClock(Tile),
    #[error("signal loop through tile {0}")]
    Loop(Tile),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum Node {
    Vertex(VertexId),
    Wire(Tile, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum Source {
    Node(usize),
    /// Unplaced primary input, by PI position.
    External(usize),
}

/// Node graph of a layout in evaluation order.
pub(super) struct SignalGraph {
    pub nodes: Vec<Node>,
    pub tiles: Vec<Tile>,
    pub preds: Vec<Vec<Source>>,
    pub order: Vec<usize>,
    /// Value source of each primary output, in PO order.
    pub outputs: Vec<Source>,
}

impl GateLayout {
    pub(super) fn signal_graph(&self) -> Result<SignalGraph, SimulationError> {
        let net = &self.network;
        let mut nodes = Vec::new();
        let mut tiles = Vec::new();
        let mut vertex_node = vec![None; net.vertex_count()];
        let mut wire_node = std::collections::BTreeMap::new();
        for (t, v) in self.placed_vertices() {
            vertex_node[v.0] = Some(nodes.len());
            nodes.push(Node::Vertex(v));
            tiles.push(t);
        }
        for (t, segs) in self.wire_tiles() {
            for i in 0..segs.len() {
                wire_node.insert((t, i), nodes.len());
                nodes.push(Node::Wire(t, i));
                tiles.push(t);
            }
        }
        let pi_pos = |v: VertexId| net.pis().iter().position(|&p| p == v);

        // the node on tile `from` that drives into tile `to`
        let driver_into = |from: Tile, to: Tile, edge: Option<EdgeId>| -> Option<usize> {
            if let Some(v) = self.vertex_at(from) {
                return vertex_node[v.0];
            }
            self.wires_at(from)
                .iter()
                .enumerate()
                .find(|(_, s)| from.step(s.exit) == Some(to) && edge.is_none_or(|e| s.edge == e))
                .map(|(i, _)| wire_node[&(from, i)])
        };

        let mut preds = vec![Vec::new(); nodes.len()];
        for (idx, node) in nodes.iter().enumerate() {
            match *node {
                Node::Wire(t, i) => {
                    let seg = self.wires_at(t)[i];
                    let from = self.neighbor(t, seg.entry).ok_or(SimulationError::OpenWire(t))?;
                    let d = driver_into(from, t, None).ok_or(SimulationError::OpenWire(t))?;
                    preds[idx].push(Source::Node(d));
                }
                Node::Vertex(v) => {
                    let t = tiles[idx];
                    for (port, &e) in net.fanin_edges(v).iter().enumerate() {
                        let u = net.edge(e).source;
                        if self.tile_of(u).is_none() {
                            let pos = pi_pos(u).ok_or(SimulationError::Unplaced(u))?;
                            preds[idx].push(Source::External(pos));
                            continue;
                        }
                        let found = super::Dir::ALL.into_iter().find_map(|d| {
                            let n = self.neighbor(t, d)?;
                            if self.vertex_at(n) == Some(u) {
                                return vertex_node[u.0];
                            }
                            if self.vertex_at(n).is_some() {
                                return None;
                            }
                            driver_into(n, t, Some(e))
                        });
                        let d = found.ok_or(SimulationError::Undriven { vertex: v, port })?;
                        preds[idx].push(Source::Node(d));
                    }
                }
            }
        }

        let mut outputs = Vec::new();
        for &po in net.pos() {
            if let Some(n) = vertex_node[po.0] {
                outputs.push(Source::Node(n));
                continue;
            }
            let u = net.fanins(po).next().expect("PO has a driver");
            match vertex_node[u.0] {
                Some(n) => outputs.push(Source::Node(n)),
                None => outputs.push(Source::External(pi_pos(u).ok_or(SimulationError::Unplaced(u))?)),
            }
        }
        for v in net.vertices() {
            if vertex_node[v.id.0].is_none() && !v.op.is_io() {
                return Err(SimulationError::Unplaced(v.id));
            }
        }

        // Kahn's algorithm over the geometric graph
        let mut succs = vec![Vec::new(); nodes.len()];
        let mut indeg = vec![0usize; nodes.len()];
        for (i, ps) in preds.iter().enumerate() {
            for p in ps {
                if let Source::Node(j) = *p {
                    succs[j].push(i);
                    indeg[i] += 1;
                }
            }
        }
        let mut queue: VecDeque<usize> = (0..nodes.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(nodes.len());
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &s in &succs[i] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    queue.push_back(s);
                }
            }
        }
        if order.len() != nodes.len() {
            let stuck = (0..nodes.len()).find(|&i| indeg[i] > 0).expect("some node is stuck");
            return Err(SimulationError::Loop(tiles[stuck]));
        }
        Ok(SignalGraph {
            nodes,
            tiles,
            preds,
            order,
            outputs,
        })
    }

    /// Propagates input values (in PI order) through the layout and returns
    /// the output values in PO order.
    pub fn simulate_layout(&self, inputs: &[bool]) -> Result<Vec<bool>, SimulationError> {
        let g = self.signal_graph()?;
        self.simulate_graph(&g, inputs)
    }

    /// Simulates every assignment in `vectors` on one shared signal graph.
    pub fn simulate_layout_many(&self, vectors: &[Vec<bool>]) -> Result<Vec<Vec<bool>>, SimulationError> {
        let g = self.signal_graph()?;
        vectors.iter().map(|v| self.simulate_graph(&g, v)).collect()
    }

    fn simulate_graph(&self, g: &SignalGraph, inputs: &[bool]) -> Result<Vec<bool>, SimulationError> {
        let net = &self.network;
        if inputs.len() != net.pis().len() {
            return Err(SimulationError::InputCount {
                expected: net.pis().len(),
                got: inputs.len(),
            });
        }
        let mut value = vec![false; g.nodes.len()];
        let read = |value: &[bool], s: Source| match s {
            Source::Node(j) => value[j],
            Source::External(p) => inputs[p],
        };
        let mut scratch = Vec::with_capacity(3);
        for &i in &g.order {
            value[i] = match g.nodes[i] {
                Node::Wire(..) => read(&value, g.preds[i][0]),
                Node::Vertex(v) => match net.op(v) {
                    Op::Pi => inputs[net.pis().iter().position(|&p| p == v).expect("PI is listed")],
                    op => {
                        scratch.clear();
                        scratch.extend(g.preds[i].iter().map(|&s| read(&value, s)));
                        op.eval(&scratch)
                    }
                },
            };
        }
        Ok(g.outputs.iter().map(|&s| read(&value, s)).collect())
    }
}
