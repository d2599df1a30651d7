//! Wave-pipelining simulation.
//!
//! Every tile is a register clocked by its phase: at each phase step the
//! nodes whose clock matches take their new value from their drivers.
//! Inputs change every `k` clock cycles. Each value carries the range of
//! input vectors it was computed from, so an output sample is usable only
//! if that range is a single vector. The smallest `k` at which every vector
//! shows up at every output as such a sample, with the right value, is the
//! safe input interval. This deliberately shares nothing with the static
//! throughput analysis, which it serves to check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sim::{Node, Source};
use super::{GateLayout, SimulationError};
use crate::network::Op;

const VECTORS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tag {
    Unset,
    /// Stable for every vector (constants).
    Any,
    Range(usize, usize),
}

impl Tag {
    fn join(self, o: Tag) -> Tag {
        match (self, o) {
            (Tag::Unset, _) | (_, Tag::Unset) => Tag::Unset,
            (Tag::Any, t) | (t, Tag::Any) => t,
            (Tag::Range(a, b), Tag::Range(c, d)) => Tag::Range(a.min(c), b.max(d)),
        }
    }
}

impl GateLayout {
    /// Smallest input interval in clock cycles, up to `max_k`, at which the
    /// layout computes every input vector correctly under wave pipelining.
    /// `None` if no interval up to `max_k` works.
    pub fn min_safe_interval(&self, max_k: u32, seed: u64) -> Result<Option<u32>, SimulationError> {
        let g = self.signal_graph()?;
        let net = &self.network;
        let n = self.scheme.phases as usize;
        let phase: Vec<usize> = g
            .tiles
            .iter()
            .map(|&t| self.clock(t).map(|z| z as usize).ok_or(SimulationError::NoClock(t)))
            .collect::<Result<_, _>>()?;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vectors: Vec<Vec<bool>> = (0..VECTORS)
            .map(|_| (0..net.pis().len()).map(|_| rng.gen()).collect())
            .collect();
        let expected: Vec<Vec<bool>> = vectors
            .iter()
            .map(|v| net.simulate(v).expect("vector width matches"))
            .collect();

        // latency bound: every hop waits at most one full cycle
        let mut depth = vec![0usize; g.nodes.len()];
        for &i in &g.order {
            for p in &g.preds[i] {
                if let Source::Node(j) = *p {
                    depth[i] = depth[i].max(depth[j] + n);
                }
            }
        }
        let latency = depth.iter().copied().max().unwrap_or(0) + 2 * n;

        for k in 1..=max_k as usize {
            if self.wave_run(&g, &phase, k, latency, &vectors, &expected) {
                return Ok(Some(k as u32));
            }
        }
        Ok(None)
    }

    fn wave_run(
        &self,
        g: &super::sim::SignalGraph,
        phase: &[usize],
        k: usize,
        latency: usize,
        vectors: &[Vec<bool>],
        expected: &[Vec<bool>],
    ) -> bool {
        let net = &self.network;
        let n = self.scheme.phases as usize;
        let m = vectors.len();
        let steps = n * m * k + latency;
        let pi_pos: Vec<Option<usize>> = g
            .nodes
            .iter()
            .map(|node| match *node {
                Node::Vertex(v) if net.op(v) == Op::Pi => net.pis().iter().position(|&p| p == v),
                _ => None,
            })
            .collect();

        let mut by_phase = vec![Vec::new(); n];
        for (i, &z) in phase.iter().enumerate() {
            by_phase[z].push(i);
        }
        let mut watch: Vec<Vec<usize>> = vec![Vec::new(); g.nodes.len()];
        for (o, s) in g.outputs.iter().enumerate() {
            if let Source::Node(j) = *s {
                watch[j].push(o);
            }
        }

        let mut state = vec![(Tag::Unset, false); g.nodes.len()];
        let mut seen = vec![vec![false; m]; g.outputs.len()];
        let mut wrong = false;
        let mut updates = Vec::new();
        let mut scratch = Vec::with_capacity(3);
        for s in 0..steps {
            let current = ((s / n) / k).min(m - 1);
            updates.clear();
            for &i in &by_phase[s % n] {
                let next = match g.nodes[i] {
                    Node::Wire(..) => match g.preds[i][0] {
                        Source::Node(j) => state[j],
                        Source::External(_) => unreachable!("wires are driven by tiles"),
                    },
                    Node::Vertex(v) => match net.op(v) {
                        Op::Pi => {
                            let p = pi_pos[i].expect("PI is listed");
                            (Tag::Range(current, current), vectors[current][p])
                        }
                        Op::Const0 => (Tag::Any, false),
                        Op::Const1 => (Tag::Any, true),
                        op => {
                            let mut tag = Tag::Any;
                            let mut external = false;
                            for p in &g.preds[i] {
                                match *p {
                                    Source::Node(j) => tag = tag.join(state[j].0),
                                    Source::External(_) => external = true,
                                }
                            }
                            if external && tag == Tag::Any {
                                tag = Tag::Range(current, current);
                            }
                            let base = match tag {
                                Tag::Range(lo, _) => lo,
                                _ => current,
                            };
                            scratch.clear();
                            scratch.extend(g.preds[i].iter().map(|p| match *p {
                                Source::Node(j) => state[j].1,
                                Source::External(q) => vectors[base][q],
                            }));
                            (tag, op.eval(&scratch))
                        }
                    },
                };
                updates.push((i, next));
            }
            for &(i, next) in &updates {
                state[i] = next;
                for &o in &watch[i] {
                    match next.0 {
                        Tag::Range(a, b) if a == b => {
                            if next.1 == expected[a][o] {
                                seen[o][a] = true;
                            } else {
                                wrong = true;
                            }
                        }
                        Tag::Any => {
                            for (idx, exp) in expected.iter().enumerate() {
                                if exp[o] == next.1 {
                                    seen[o][idx] = true;
                                } else {
                                    wrong = true;
                                }
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
        let direct_ok = g.outputs.iter().enumerate().all(|(o, s)| match *s {
            Source::External(p) => vectors.iter().zip(expected).all(|(v, e)| v[p] == e[o]),
            Source::Node(_) => seen[o].iter().all(|&b| b),
        });
        !wrong && direct_ok
    }
}
