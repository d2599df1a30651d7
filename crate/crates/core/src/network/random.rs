//! Random networks for benchmarking and fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{LogicNetwork, NetworkBuilder, Op, VertexId};

#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub pis: usize,
    pub gates: usize,
    /// Gate operators to draw from; PI, PO and fan-out entries are ignored.
    pub ops: Vec<Op>,
}

impl RandomSpec {
    pub fn new(pis: usize, gates: usize) -> Self {
        RandomSpec {
            pis,
            gates,
            ops: vec![Op::And, Op::Or, Op::Not],
        }
    }
}

/// Draws a connected-ish DAG: each gate prefers signals nobody reads yet,
/// and every signal left unread at the end drives a PO. The result is not
/// fan-out substituted.
pub fn random_network<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSpec) -> LogicNetwork {
    let ops: Vec<Op> = spec
        .ops
        .iter()
        .copied()
        .filter(|op| !matches!(op, Op::Pi | Op::Po | Op::Fanout))
        .collect();
    assert!(!ops.is_empty(), "no gate operators to draw from");
    let mut b = NetworkBuilder::new("random");
    let mut signals: Vec<VertexId> = (0..spec.pis.max(1)).map(|i| b.add_pi(format!("x{i}"))).collect();
    let mut unread = signals.clone();
    for _ in 0..spec.gates {
        let op = *ops.choose(rng).expect("non-empty");
        let arity = op.arity().min(signals.len());
        if arity < op.arity() {
            continue;
        }
        let mut fanins: Vec<VertexId> = Vec::with_capacity(arity);
        while fanins.len() < arity {
            let pool = if unread.iter().any(|s| !fanins.contains(s)) {
                &unread
            } else {
                &signals
            };
            let s = *pool.choose(rng).expect("non-empty");
            if !fanins.contains(&s) {
                fanins.push(s);
            }
        }
        unread.retain(|s| !fanins.contains(s));
        let g = b.add_gate(op, &fanins).expect("fan-ins exist and arity matches");
        signals.push(g);
        unread.push(g);
    }
    for (i, s) in unread.into_iter().enumerate() {
        b.add_po(format!("y{i}"), s).expect("driver exists");
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_signal_is_read() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let net = random_network(&mut rng, &RandomSpec::new(4, 15));
            for v in net.vertices() {
                if v.op != Op::Po {
                    assert!(!net.fanout_edges(v.id).is_empty(), "{} unread", v.id);
                }
            }
        }
    }
}
