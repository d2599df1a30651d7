//! Helpers shared by the integration tests: input vectors, an equivalence
//! check, an enumerator of small networks and a brute-force placer that
//! shares no code with the SAT encoding.

#![allow(dead_code)]

use std::sync::Arc;

use fcn_core::clocking::ClockingScheme;
use fcn_core::layout::{Dir, GateLayout, Layer, Tile};
use fcn_core::network::{LogicNetwork, NetworkBuilder, Op, VertexId};
use rand::Rng;

/// All assignments for up to 8 inputs, otherwise 64 random ones.
pub fn vectors<R: Rng>(pis: usize, rng: &mut R) -> Vec<Vec<bool>> {
    if pis <= 8 {
        (0..1u32 << pis)
            .map(|m| (0..pis).map(|i| (m >> i) & 1 == 1).collect())
            .collect()
    } else {
        (0..64).map(|_| (0..pis).map(|_| rng.gen()).collect()).collect()
    }
}

/// Compares layout and network simulation on `vectors`.
pub fn equivalent(layout: &GateLayout, net: &LogicNetwork, vectors: &[Vec<bool>]) -> Result<(), String> {
    let got = layout.simulate_layout_many(vectors).map_err(|e| e.to_string())?;
    for (v, g) in vectors.iter().zip(got) {
        let want = net.simulate(v).map_err(|e| e.to_string())?;
        if g != want {
            return Err(format!("inputs {v:?}: layout {g:?}, network {want:?}"));
        }
    }
    Ok(())
}

/// Every connected network of 1..=`max_gates` NOT, AND and fan-out gates
/// with degree at most 2. Unconnected gate inputs read fresh PIs and spare
/// gate outputs drive POs. Inputs of a gate are listed in non-decreasing
/// order, which removes most port-swapped duplicates.
pub fn small_networks(max_gates: usize) -> Vec<LogicNetwork> {
    #[derive(Clone)]
    struct Gate {
        op: Op,
        // None is a PI
        ins: Vec<Option<usize>>,
    }
    fn capacity(op: Op) -> usize {
        if op == Op::Fanout {
            2
        } else {
            1
        }
    }
    fn rec(gates: &mut Vec<Gate>, used: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<Gate>>) {
        if gates.len() == k {
            out.push(gates.clone());
            return;
        }
        for op in [Op::Not, Op::And, Op::Fanout] {
            for choice in tuples(op.arity(), gates.len()) {
                let mut take = vec![0usize; gates.len()];
                for s in choice.iter().flatten() {
                    take[*s] += 1;
                }
                if take
                    .iter()
                    .enumerate()
                    .any(|(j, &t)| used[j] + t > capacity(gates[j].op))
                {
                    continue;
                }
                for (j, &t) in take.iter().enumerate() {
                    used[j] += t;
                }
                gates.push(Gate { op, ins: choice });
                used.push(0);
                rec(gates, used, k, out);
                used.pop();
                gates.pop();
                for (j, &t) in take.iter().enumerate() {
                    used[j] -= t;
                }
            }
        }
    }
    /// Non-decreasing tuples over PI (None) and gates 0..n.
    fn tuples(len: usize, n: usize) -> Vec<Vec<Option<usize>>> {
        let symbols: Vec<Option<usize>> = std::iter::once(None).chain((0..n).map(Some)).collect();
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for t in &out {
                let from = t
                    .last()
                    .map_or(0, |l| symbols.iter().position(|s| s == l).expect("known"));
                for s in &symbols[from..] {
                    let mut u: Vec<Option<usize>> = t.clone();
                    u.push(*s);
                    next.push(u);
                }
            }
            out = next;
        }
        out
    }
    let mut shapes = Vec::new();
    for k in 1..=max_gates {
        rec(&mut Vec::new(), &mut Vec::new(), k, &mut shapes);
    }
    let mut nets = Vec::new();
    for gates in shapes {
        // connectivity over gate-to-gate edges
        let n = gates.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for (i, g) in gates.iter().enumerate() {
            for s in g.ins.iter().flatten() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, *s));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        if (0..n).any(|i| find(&mut parent, i) != root) {
            continue;
        }
        let mut b = NetworkBuilder::new(format!("n{}", nets.len()));
        let mut ids: Vec<VertexId> = Vec::new();
        let mut readers = vec![0usize; n];
        let mut pis = 0;
        for g in &gates {
            let fanins: Vec<VertexId> = g
                .ins
                .iter()
                .map(|s| match s {
                    Some(j) => {
                        readers[*j] += 1;
                        ids[*j]
                    }
                    None => {
                        pis += 1;
                        b.add_pi(format!("x{pis}"))
                    }
                })
                .collect();
            ids.push(b.add_gate(g.op, &fanins).expect("valid gate"));
        }
        let mut pos = 0;
        for (j, g) in gates.iter().enumerate() {
            for _ in readers[j]..capacity(g.op) {
                pos += 1;
                b.add_po(format!("y{pos}"), ids[j]).expect("driver exists");
            }
        }
        nets.push(b.build());
    }
    nets
}

/// Minimum-area layout on 2DDWave without pins or crossings and with
/// unbalanced paths allowed, found by trying every placement of the gates
/// and every monotone east/south routing of the gate-to-gate edges.
pub fn brute_force_min_area(net: &LogicNetwork, max_area: u32) -> Option<GateLayout> {
    let gates: Vec<VertexId> = net.vertices().iter().filter(|v| !v.op.is_io()).map(|v| v.id).collect();
    let index = |v: VertexId| gates.iter().position(|&g| g == v);
    let edges: Vec<(usize, usize, usize)> = net
        .edges()
        .iter()
        .filter_map(|e| Some((e.id.0, index(e.source)?, index(e.target)?)))
        .collect();
    let k = gates.len() as u32;
    for area in k.max(1)..=max_area {
        for w in 1..=area {
            if area % w != 0 {
                continue;
            }
            let h = area / w;
            let mut pos: Vec<Tile> = Vec::new();
            if let Some(found) = place(w, h, &edges, gates.len(), &mut pos) {
                return Some(build(net, w, h, &gates, &pos, &edges, &found));
            }
        }
    }
    None
}

type Path = Vec<Tile>;

fn place(w: u32, h: u32, edges: &[(usize, usize, usize)], n: usize, pos: &mut Vec<Tile>) -> Option<Vec<Path>> {
    if pos.len() == n {
        let mut used: Vec<Tile> = pos.clone();
        let mut paths = Vec::new();
        return route(edges, pos, w, h, &mut used, &mut paths).then_some(paths);
    }
    let i = pos.len();
    for y in 0..h {
        for x in 0..w {
            let t = Tile::new(x, y);
            if pos.contains(&t) {
                continue;
            }
            // every edge between placed gates must point east/south
            let monotone = edges.iter().all(|&(_, s, d)| {
                if d == i && s < i {
                    pos[s].x <= x && pos[s].y <= y
                } else {
                    true
                }
            });
            if !monotone {
                continue;
            }
            pos.push(t);
            if let Some(p) = place(w, h, edges, n, pos) {
                return Some(p);
            }
            pos.pop();
        }
    }
    None
}

fn route(
    edges: &[(usize, usize, usize)],
    pos: &[Tile],
    w: u32,
    h: u32,
    used: &mut Vec<Tile>,
    paths: &mut Vec<Path>,
) -> bool {
    let i = paths.len();
    if i == edges.len() {
        return sides_distinct(edges, pos, paths);
    }
    let (_, s, d) = edges[i];
    let (from, to) = (pos[s], pos[d]);
    let mut options = Vec::new();
    let mut cur = Vec::new();
    walk(from, to, w, h, used, &mut cur, &mut options);
    for p in options {
        used.extend(&p);
        paths.push(p.clone());
        if route(edges, pos, w, h, used, paths) {
            return true;
        }
        paths.pop();
        used.truncate(used.len() - p.len());
    }
    false
}

/// Wire tiles of every east/south path from `at` to `to` over free tiles.
fn walk(at: Tile, to: Tile, w: u32, h: u32, used: &[Tile], cur: &mut Path, out: &mut Vec<Path>) {
    for next in [Tile::new(at.x + 1, at.y), Tile::new(at.x, at.y + 1)] {
        if next.x >= w || next.y >= h || next.x > to.x || next.y > to.y {
            continue;
        }
        if next == to {
            out.push(cur.clone());
        } else if !used.contains(&next) && !cur.contains(&next) {
            cur.push(next);
            walk(next, to, w, h, used, cur, out);
            cur.pop();
        }
    }
}

/// A tile side carries one signal: out-neighbors of a gate and
/// in-neighbors of a gate must differ between its edges.
fn sides_distinct(edges: &[(usize, usize, usize)], pos: &[Tile], paths: &[Path]) -> bool {
    let mut outs: Vec<(usize, Tile)> = Vec::new();
    let mut ins: Vec<(usize, Tile)> = Vec::new();
    for (&(_, s, d), p) in edges.iter().zip(paths) {
        let first = p.first().copied().unwrap_or(pos[d]);
        let last = p.last().copied().unwrap_or(pos[s]);
        if outs.contains(&(s, first)) || ins.contains(&(d, last)) {
            return false;
        }
        outs.push((s, first));
        ins.push((d, last));
    }
    true
}

fn build(
    net: &LogicNetwork,
    w: u32,
    h: u32,
    gates: &[VertexId],
    pos: &[Tile],
    edges: &[(usize, usize, usize)],
    paths: &[Path],
) -> GateLayout {
    let mut l = GateLayout::new(w, h, ClockingScheme::two_d_d_wave(4), Arc::new(net.clone()));
    for (g, t) in gates.iter().zip(pos) {
        l.assign_logic_vertex(*t, *g).expect("free tile");
    }
    for (&(e, s, d), p) in edges.iter().zip(paths) {
        let mut prev = pos[s];
        for (i, &t) in p.iter().enumerate() {
            let next = p.get(i + 1).copied().unwrap_or(pos[d]);
            let entry: Dir = t.dir_to(prev).expect("adjacent");
            let exit: Dir = t.dir_to(next).expect("adjacent");
            l.assign_wire(t, fcn_core::network::EdgeId(e), Layer::Ground, entry, exit)
                .expect("free wire tile");
            prev = t;
        }
    }
    l
}

/// Exact USE layouts with unbalanced paths allowed and a throughput worse
/// than 1/1, drawn from small random networks until `count` are found.
pub fn unbalanced_layouts(count: usize, seed: u64) -> Vec<GateLayout> {
    use fcn_core::exact::{exact_layout, ExactParams};
    use fcn_core::network::{random_network, RandomSpec};
    use fcn_core::techmap::QCA_ONE_OPS;
    use rand::SeedableRng;

    let params = ExactParams {
        scheme: ClockingScheme::from_name("use").expect("built-in scheme"),
        desync: true,
        timeout: Some(std::time::Duration::from_secs(10)),
        ..ExactParams::default()
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..count * 20 {
        if out.len() == count {
            break;
        }
        let gates = rng.gen_range(2..6);
        let net = random_network(&mut rng, &RandomSpec::new(3, gates))
            .lower_to(&QCA_ONE_OPS)
            .substitute_fanouts(2)
            .expect("fan-out limit of 2");
        let Ok(r) = exact_layout(&net, &params) else { continue };
        if let Some(l) = r.layout {
            if l.throughput().expect("valid layout").denominator > 1 {
                out.push(l);
            }
        }
    }
    out
}
