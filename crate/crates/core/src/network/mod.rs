//! Gate-level logic networks.
//!
//! A [`LogicNetwork`] is an acyclic graph of primary inputs, primary outputs,
//! logic gates and fan-out nodes. Networks are built through
//! [`NetworkBuilder`], which only lets a vertex reference vertices that
//! already exist, so vertex ids are always a topological order.

mod random;
mod verilog;

pub use random::{random_network, RandomSpec};
pub use verilog::{parse_verilog, unparse_verilog, ParseError};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a vertex inside its network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

/// Index of an edge inside its network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Pi,
    Po,
    And,
    Or,
    Not,
    Xor,
    Nand,
    Nor,
    Xnor,
    Maj,
    Fanout,
    Const0,
    Const1,
}

impl Op {
    pub const ALL: [Op; 13] = [
        Op::Pi,
        Op::Po,
        Op::And,
        Op::Or,
        Op::Not,
        Op::Xor,
        Op::Nand,
        Op::Nor,
        Op::Xnor,
        Op::Maj,
        Op::Fanout,
        Op::Const0,
        Op::Const1,
    ];

    /// Required number of fan-ins.
    pub fn arity(self) -> usize {
        match self {
            Op::Pi | Op::Const0 | Op::Const1 => 0,
            Op::Po | Op::Not | Op::Fanout => 1,
            Op::And | Op::Or | Op::Xor | Op::Nand | Op::Nor | Op::Xnor => 2,
            Op::Maj => 3,
        }
    }

    pub fn is_io(self) -> bool {
        matches!(self, Op::Pi | Op::Po)
    }

    pub fn is_const(self) -> bool {
        matches!(self, Op::Const0 | Op::Const1)
    }

    pub fn name(self) -> &'static str {
        match self {
            Op::Pi => "pi",
            Op::Po => "po",
            Op::And => "and",
            Op::Or => "or",
            Op::Not => "not",
            Op::Xor => "xor",
            Op::Nand => "nand",
            Op::Nor => "nor",
            Op::Xnor => "xnor",
            Op::Maj => "maj",
            Op::Fanout => "fanout",
            Op::Const0 => "const0",
            Op::Const1 => "const1",
        }
    }

    pub fn from_name(name: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.name() == name)
    }

    /// Evaluates the operator on its fan-in values.
    ///
    /// PIs have no function of their own; callers supply their values.
    pub fn eval(self, inputs: &[bool]) -> bool {
        match self {
            Op::Pi => panic!("primary inputs are not evaluated"),
            Op::Po | Op::Fanout => inputs[0],
            Op::Not => !inputs[0],
            Op::And => inputs[0] & inputs[1],
            Op::Or => inputs[0] | inputs[1],
            Op::Xor => inputs[0] ^ inputs[1],
            Op::Nand => !(inputs[0] & inputs[1]),
            Op::Nor => !(inputs[0] | inputs[1]),
            Op::Xnor => !(inputs[0] ^ inputs[1]),
            Op::Maj => (inputs[0] as u8 + inputs[1] as u8 + inputs[2] as u8) >= 2,
            Op::Const0 => false,
            Op::Const1 => true,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub op: Op,
    /// Port name for PIs and POs, empty otherwise.
    pub label: String,
}

/// A connection from the output of `source` to input port `port` of `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub source: VertexId,
    pub target: VertexId,
    pub port: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("{op} expects {expected} fan-ins, got {got}")]
    Arity { op: Op, expected: usize, got: usize },
    #[error("vertex {0} does not exist yet")]
    UnknownVertex(VertexId),
    #[error("primary output {0} cannot drive other vertices")]
    PoAsFanin(VertexId),
    #[error("missing value for primary input `{0}`")]
    MissingInput(String),
    #[error("expected {expected} input values, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("max fan-out must be at least 2, got {0}")]
    MaxFanout(usize),
}

/// Counters reported by [`LogicNetwork::stats`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub pi_count: usize,
    pub po_count: usize,
    pub fanout_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicNetwork {
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    fanin_edges: Vec<Vec<EdgeId>>,
    fanout_edges: Vec<Vec<EdgeId>>,
    pis: Vec<VertexId>,
    pos: Vec<VertexId>,
}

impl LogicNetwork {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertices in id order, which is a topological order.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.0]
    }

    pub fn op(&self, v: VertexId) -> Op {
        self.vertices[v.0].op
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    /// Incoming edges of `v`, ordered by input port.
    pub fn fanin_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.fanin_edges[v.0]
    }

    pub fn fanout_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.fanout_edges[v.0]
    }

    pub fn fanins(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.fanin_edges[v.0].iter().map(|e| self.edges[e.0].source)
    }

    pub fn pis(&self) -> &[VertexId] {
        &self.pis
    }

    pub fn pos(&self) -> &[VertexId] {
        &self.pos
    }

    pub fn pi_labels(&self) -> Vec<&str> {
        self.pis.iter().map(|&v| self.vertex(v).label.as_str()).collect()
    }

    pub fn po_labels(&self) -> Vec<&str> {
        self.pos.iter().map(|&v| self.vertex(v).label.as_str()).collect()
    }

    pub fn stats(&self) -> NetworkStats {
        NetworkStats {
            vertex_count: self.vertices.len(),
            edge_count: self.edges.len(),
            pi_count: self.pis.len(),
            po_count: self.pos.len(),
            fanout_count: self.vertices.iter().filter(|v| v.op == Op::Fanout).count(),
        }
    }

    /// Largest out-degree over all vertices.
    pub fn max_out_degree(&self) -> usize {
        self.fanout_edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Simulates the network on input values given in PI order and returns
    /// output values in PO order.
    pub fn simulate(&self, inputs: &[bool]) -> Result<Vec<bool>, NetworkError> {
        if inputs.len() != self.pis.len() {
            return Err(NetworkError::InputCount {
                expected: self.pis.len(),
                got: inputs.len(),
            });
        }
        let mut values = vec![false; self.vertices.len()];
        let mut next_pi = 0;
        let mut scratch = Vec::with_capacity(3);
        for vertex in &self.vertices {
            values[vertex.id.0] = if vertex.op == Op::Pi {
                next_pi += 1;
                inputs[next_pi - 1]
            } else {
                scratch.clear();
                scratch.extend(self.fanins(vertex.id).map(|u| values[u.0]));
                vertex.op.eval(&scratch)
            };
        }
        Ok(self.pos.iter().map(|&po| values[po.0]).collect())
    }

    /// Simulates the network on a labelled assignment.
    pub fn simulate_labeled(
        &self,
        assignment: &BTreeMap<String, bool>,
    ) -> Result<BTreeMap<String, bool>, NetworkError> {
        let inputs = self
            .pis
            .iter()
            .map(|&pi| {
                let label = &self.vertex(pi).label;
                assignment
                    .get(label)
                    .copied()
                    .ok_or_else(|| NetworkError::MissingInput(label.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let outputs = self.simulate(&inputs)?;
        Ok(self
            .pos
            .iter()
            .zip(outputs)
            .map(|(&po, value)| (self.vertex(po).label.clone(), value))
            .collect())
    }

    /// Returns one output vector per input assignment, enumerating
    /// assignments as binary numbers with the first PI as least significant
    /// bit. Intended for small networks.
    pub fn truth_table(&self) -> Vec<Vec<bool>> {
        let n = self.pis.len();
        assert!(n <= 20, "truth table of {n} inputs is too large");
        (0..1u32 << n)
            .map(|row| {
                let inputs: Vec<bool> = (0..n).map(|i| row >> i & 1 == 1).collect();
                self.simulate(&inputs).expect("input count matches")
            })
            .collect()
    }

    /// Rewrites every signal read more than once through a chain of fan-out
    /// vertices, each driving at most `max_fanout` readers.
    ///
    /// Readers are served in (vertex id, port) order; every fan-out in the
    /// chain passes its last branch on to the next fan-out. The result is
    /// equal to the input when no rewrite is needed.
    pub fn substitute_fanouts(&self, max_fanout: usize) -> Result<LogicNetwork, NetworkError> {
        if max_fanout < 2 {
            return Err(NetworkError::MaxFanout(max_fanout));
        }
        let mut builder = NetworkBuilder::new(self.name.clone());
        // readers[v] lists the (reader, port) pairs of v in service order.
        // `supply[v]` holds the new vertex feeding each of them.
        let mut supply: Vec<Vec<VertexId>> = vec![Vec::new(); self.vertices.len()];
        let mut served: Vec<usize> = vec![0; self.vertices.len()];
        for vertex in &self.vertices {
            let fanins: Vec<VertexId> = self
                .fanin_edges(vertex.id)
                .iter()
                .map(|&e| {
                    let src = self.edge(e).source;
                    let s = supply[src.0][served[src.0]];
                    served[src.0] += 1;
                    s
                })
                .collect();
            let new_id = builder.push(vertex.op, vertex.label.clone(), &fanins)?;
            let readers = self.fanout_edges(vertex.id).len();
            let limit = if vertex.op == Op::Fanout { max_fanout } else { 1 };
            supply[vertex.id.0] = if readers <= limit {
                vec![new_id; readers]
            } else if vertex.op == Op::Fanout {
                // an oversized fan-out keeps max_fanout - 1 readers and chains on
                let mut out = Vec::with_capacity(readers);
                fanout_chain(&mut builder, new_id, readers, max_fanout, true, &mut out)?;
                out
            } else {
                let mut out = Vec::with_capacity(readers);
                fanout_chain(&mut builder, new_id, readers, max_fanout, false, &mut out)?;
                out
            };
        }
        Ok(builder.build())
    }

    /// Rewrites operators outside `supported` into AND/OR/NOT (and fan-outs
    /// where a signal must be read twice). PI, PO, FANOUT and constants are
    /// always kept.
    pub fn lower_to(&self, supported: &[Op]) -> LogicNetwork {
        let keep =
            |op: Op| supported.contains(&op) || matches!(op, Op::Pi | Op::Po | Op::Fanout | Op::Const0 | Op::Const1);
        let mut b = NetworkBuilder::new(self.name.clone());
        let mut map: Vec<VertexId> = Vec::with_capacity(self.vertices.len());
        for vertex in &self.vertices {
            let f: Vec<VertexId> = self.fanins(vertex.id).map(|u| map[u.0]).collect();
            let op = vertex.op;
            let id = if keep(op) {
                b.push(op, vertex.label.clone(), &f).expect("arity preserved")
            } else {
                lower_op(&mut b, op, &f)
            };
            map.push(id);
        }
        b.build()
    }

    /// Whether the network uses only operators in `ops` (plus I/O,
    /// fan-outs and constants).
    pub fn uses_only(&self, ops: &[Op]) -> Result<(), Op> {
        for v in &self.vertices {
            let always = matches!(v.op, Op::Pi | Op::Po | Op::Fanout | Op::Const0 | Op::Const1);
            if !always && !ops.contains(&v.op) {
                return Err(v.op);
            }
        }
        Ok(())
    }

    /// Serializable form of the network.
    pub fn to_data(&self) -> NetworkData {
        NetworkData {
            name: self.name.clone(),
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexData {
                    op: v.op,
                    label: v.label.clone(),
                    fanins: self.fanins(v.id).map(|u| u.0).collect(),
                })
                .collect(),
        }
    }

    pub fn from_data(data: &NetworkData) -> Result<LogicNetwork, NetworkError> {
        let mut b = NetworkBuilder::new(data.name.clone());
        for v in &data.vertices {
            let fanins: Vec<VertexId> = v.fanins.iter().map(|&i| VertexId(i)).collect();
            b.push(v.op, v.label.clone(), &fanins)?;
        }
        Ok(b.build())
    }
}

fn fanout_chain(
    b: &mut NetworkBuilder,
    driver: VertexId,
    readers: usize,
    max_fanout: usize,
    driver_is_fanout: bool,
    out: &mut Vec<VertexId>,
) -> Result<(), NetworkError> {
    let mut current = driver;
    let mut remaining = readers;
    if driver_is_fanout {
        for _ in 0..max_fanout - 1 {
            out.push(current);
        }
        remaining -= max_fanout - 1;
        current = b.push(Op::Fanout, String::new(), &[current])?;
    } else {
        current = b.push(Op::Fanout, String::new(), &[current])?;
    }
    loop {
        if remaining <= max_fanout {
            out.extend(std::iter::repeat_n(current, remaining));
            return Ok(());
        }
        for _ in 0..max_fanout - 1 {
            out.push(current);
        }
        remaining -= max_fanout - 1;
        current = b.push(Op::Fanout, String::new(), &[current])?;
    }
}

fn lower_op(b: &mut NetworkBuilder, op: Op, f: &[VertexId]) -> VertexId {
    let gate =
        |b: &mut NetworkBuilder, op: Op, f: &[VertexId]| b.push(op, String::new(), f).expect("lowering keeps arity");
    match op {
        Op::Nand => {
            let a = gate(b, Op::And, f);
            gate(b, Op::Not, &[a])
        }
        Op::Nor => {
            let a = gate(b, Op::Or, f);
            gate(b, Op::Not, &[a])
        }
        Op::Xor | Op::Xnor => {
            // (a & ~b) | (~a & b)
            let na = gate(b, Op::Not, &[f[0]]);
            let nb = gate(b, Op::Not, &[f[1]]);
            let l = gate(b, Op::And, &[f[0], nb]);
            let r = gate(b, Op::And, &[na, f[1]]);
            let x = gate(b, Op::Or, &[l, r]);
            if op == Op::Xnor {
                gate(b, Op::Not, &[x])
            } else {
                x
            }
        }
        Op::Maj => {
            let ab = gate(b, Op::And, &[f[0], f[1]]);
            let ac = gate(b, Op::And, &[f[0], f[2]]);
            let bc = gate(b, Op::And, &[f[1], f[2]]);
            let o = gate(b, Op::Or, &[ab, ac]);
            gate(b, Op::Or, &[o, bc])
        }
        other => unreachable!("{other} is never lowered"),
    }
}

/// Flat serializable network description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkData {
    pub name: String,
    pub vertices: Vec<VertexData>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexData {
    pub op: Op,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fanins: Vec<usize>,
}

/// Incremental constructor for [`LogicNetwork`].
#[derive(Debug)]
pub struct NetworkBuilder {
    net: LogicNetwork,
}

impl NetworkBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetworkBuilder {
            net: LogicNetwork {
                name: name.into(),
                vertices: Vec::new(),
                edges: Vec::new(),
                fanin_edges: Vec::new(),
                fanout_edges: Vec::new(),
                pis: Vec::new(),
                pos: Vec::new(),
            },
        }
    }

    pub fn add_pi(&mut self, label: impl Into<String>) -> VertexId {
        self.push(Op::Pi, label.into(), &[]).expect("PI has no fan-ins")
    }

    pub fn add_po(&mut self, label: impl Into<String>, driver: VertexId) -> Result<VertexId, NetworkError> {
        self.push(Op::Po, label.into(), &[driver])
    }

    pub fn add_gate(&mut self, op: Op, fanins: &[VertexId]) -> Result<VertexId, NetworkError> {
        self.push(op, String::new(), fanins)
    }

    pub fn add_const(&mut self, value: bool) -> VertexId {
        let op = if value { Op::Const1 } else { Op::Const0 };
        self.push(op, String::new(), &[]).expect("constants have no fan-ins")
    }

    pub fn vertex_count(&self) -> usize {
        self.net.vertices.len()
    }

    fn push(&mut self, op: Op, label: String, fanins: &[VertexId]) -> Result<VertexId, NetworkError> {
        if fanins.len() != op.arity() {
            return Err(NetworkError::Arity {
                op,
                expected: op.arity(),
                got: fanins.len(),
            });
        }
        let id = VertexId(self.net.vertices.len());
        for &f in fanins {
            if f.0 >= id.0 {
                return Err(NetworkError::UnknownVertex(f));
            }
            if self.net.vertices[f.0].op == Op::Po {
                return Err(NetworkError::PoAsFanin(f));
            }
        }
        self.net.vertices.push(Vertex { id, op, label });
        self.net.fanin_edges.push(Vec::with_capacity(fanins.len()));
        self.net.fanout_edges.push(Vec::new());
        for (port, &source) in fanins.iter().enumerate() {
            let eid = EdgeId(self.net.edges.len());
            self.net.edges.push(Edge {
                id: eid,
                source,
                target: id,
                port,
            });
            self.net.fanin_edges[id.0].push(eid);
            self.net.fanout_edges[source.0].push(eid);
        }
        match op {
            Op::Pi => self.net.pis.push(id),
            Op::Po => self.net.pos.push(id),
            _ => {}
        }
        Ok(id)
    }

    pub fn build(self) -> LogicNetwork {
        self.net
    }
}
