//! Propositional encoding of placement, routing and clocking on a fixed grid.
//!
//! Variables:
//! - `p[v][t]`: vertex `v` sits on tile `t`.
//! - `x[e][a]`: edge `e` uses the directed arc `a` between adjacent tiles.
//!   Every edge is a flow of one unit from its source tile to its target tile.
//! - `w[e][t]`: edge `e` passes through `t` as a wire.
//! - `clk[t][k]` (open schemes) and `lat[t][l]` (latches): one-hot tile clock
//!   and latch delay.
//! - `vc[v][c]` and `ts[e][t][c]` (balanced mode): the clock cycle in which a
//!   signal reaches a vertex or a wire tile. Equal cycles at every fan-in
//!   make all reconverging paths equally long.
//!
//! On regular schemes without latches only arcs stepping to the next clock
//! number are created, so the clocking constraints hold by construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::cnf::Cnf;
use super::ExactParams;
use crate::layout::{Dir, GateLayout, Layer, Tile};
use crate::network::{EdgeId, LogicNetwork, Op, VertexId};

#[derive(Clone, Copy, Debug)]
struct Hop {
    from: usize,
    to: usize,
    dir: Dir,
}

/// Extra cardinality targets used when searching for layouts with given
/// figures; not part of the layout problem itself.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Targets {
    pub wires: Option<usize>,
    pub crossings: Option<usize>,
}

pub struct Encoding {
    pub cnf: Cnf,
    width: u32,
    height: u32,
    net: Arc<LogicNetwork>,
    params: ExactParams,
    placeable: Vec<VertexId>,
    routed: Vec<EdgeId>,
    arcs: Vec<Hop>,
    p: Vec<Vec<Option<i32>>>,
    x: Vec<Vec<Option<i32>>>,
    clk: Option<Vec<Vec<i32>>>,
    lat: Option<Vec<Vec<i32>>>,
}

impl Encoding {
    fn tile(&self, i: usize) -> Tile {
        Tile::new(i as u32 % self.width, i as u32 / self.width)
    }

    /// Builds the instance for a `width` x `height` grid.
    pub fn new(net: Arc<LogicNetwork>, params: &ExactParams, width: u32, height: u32, targets: &Targets) -> Encoding {
        let mut enc = Encoding {
            cnf: Cnf::new(),
            width,
            height,
            net: net.clone(),
            params: params.clone(),
            placeable: Vec::new(),
            routed: Vec::new(),
            arcs: Vec::new(),
            p: Vec::new(),
            x: Vec::new(),
            clk: None,
            lat: None,
        };
        enc.build(targets);
        enc
    }

    fn build(&mut self, targets: &Targets) {
        let net = self.net.clone();
        let params = self.params.clone();
        let scheme = &params.scheme;
        let n = scheme.phases as usize;
        let tiles = (self.width * self.height) as usize;
        let placed = |v: VertexId| params.io_pins || !net.op(v).is_io();

        self.placeable = net.vertices().iter().map(|v| v.id).filter(|&v| placed(v)).collect();
        let mut slot = vec![None; net.vertex_count()];
        for (i, &v) in self.placeable.iter().enumerate() {
            slot[v.0] = Some(i);
        }
        self.routed = net
            .edges()
            .iter()
            .filter(|e| placed(e.source) && placed(e.target))
            .map(|e| e.id)
            .collect();
        let edges = self.routed.len();

        // arcs
        let regular_fixed = scheme.is_regular() && !params.latches;
        let mut out_arcs = vec![Vec::new(); tiles];
        let mut in_arcs = vec![Vec::new(); tiles];
        for (from, outs) in out_arcs.iter_mut().enumerate() {
            let t = self.tile(from);
            for dir in Dir::ALL {
                let Some(nb) = t.step(dir).filter(|n| n.x < self.width && n.y < self.height) else {
                    continue;
                };
                if regular_fixed {
                    let (a, b) = (scheme.clock_number(t).unwrap(), scheme.clock_number(nb).unwrap());
                    if (a as usize + 1) % n != b as usize {
                        continue;
                    }
                }
                let to = (nb.y * self.width + nb.x) as usize;
                outs.push(self.arcs.len());
                in_arcs[to].push(self.arcs.len());
                self.arcs.push(Hop { from, to, dir });
            }
        }
        let reverse: Vec<Option<usize>> = self
            .arcs
            .iter()
            .map(|a| self.arcs.iter().position(|b| b.from == a.to && b.to == a.from))
            .collect();

        // placement
        let mut need_in = vec![0; net.vertex_count()];
        let mut need_out = vec![0; net.vertex_count()];
        for &e in &self.routed {
            need_out[net.edge(e).source.0] += 1;
            need_in[net.edge(e).target.0] += 1;
        }
        let mut p = vec![vec![None; tiles]; self.placeable.len()];
        for (i, &v) in self.placeable.iter().enumerate() {
            for (ti, var) in p[i].iter_mut().enumerate() {
                let t = self.tile(ti);
                let on_border = t.x == 0 || t.y == 0 || t.x + 1 == self.width || t.y + 1 == self.height;
                if params.border_io && net.op(v).is_io() && !on_border {
                    continue;
                }
                if out_arcs[ti].len() < need_out[v.0] || in_arcs[ti].len() < need_in[v.0] {
                    continue;
                }
                *var = Some(self.cnf.var());
            }
        }
        let occ: Vec<i32> = (0..tiles).map(|_| self.cnf.var()).collect();
        for row in &p {
            let lits: Vec<i32> = row.iter().flatten().copied().collect();
            self.cnf.exactly_one(&lits);
        }
        for ti in 0..tiles {
            let lits: Vec<i32> = p.iter().filter_map(|row| row[ti]).collect();
            self.cnf.at_most_one(&lits);
            for &l in &lits {
                self.cnf.implies(l, occ[ti]);
            }
            // occupancy means a vertex is here
            let mut c = vec![-occ[ti]];
            c.extend(&lits);
            self.cnf.clause(&c);
        }
        let pv = |p: &Vec<Vec<Option<i32>>>, v: VertexId, t: usize| slot[v.0].and_then(|i| p[i][t]);

        // routing
        let mut x = vec![vec![None; self.arcs.len()]; edges];
        for row in x.iter_mut() {
            for var in row.iter_mut() {
                *var = Some(self.cnf.var());
            }
        }
        let mut w = vec![vec![0; tiles]; edges];
        for (ei, &e) in self.routed.iter().enumerate() {
            let (u, v) = (net.edge(e).source, net.edge(e).target);
            for ti in 0..tiles {
                let wv = self.cnf.var();
                w[ei][ti] = wv;
                let outs: Vec<i32> = out_arcs[ti].iter().filter_map(|&a| x[ei][a]).collect();
                let ins: Vec<i32> = in_arcs[ti].iter().filter_map(|&a| x[ei][a]).collect();
                let pu = pv(&p, u, ti);
                let pt = pv(&p, v, ti);
                if let Some(pu) = pu {
                    let mut c = vec![-pu];
                    c.extend(&outs);
                    self.cnf.clause(&c);
                    for &i in &ins {
                        self.cnf.clause(&[-pu, -i]);
                    }
                }
                if let Some(pt) = pt {
                    let mut c = vec![-pt];
                    c.extend(&ins);
                    self.cnf.clause(&c);
                    for &o in &outs {
                        self.cnf.clause(&[-pt, -o]);
                    }
                }
                self.cnf.at_most_one(&outs);
                self.cnf.at_most_one(&ins);
                for &i in &ins {
                    let mut c = vec![-i, wv];
                    c.extend(pt);
                    self.cnf.clause(&c);
                }
                for &o in &outs {
                    let mut c = vec![-o, wv];
                    c.extend(pu);
                    self.cnf.clause(&c);
                }
                let mut c = vec![-wv];
                c.extend(&ins);
                self.cnf.clause(&c);
                let mut c = vec![-wv];
                c.extend(&outs);
                self.cnf.clause(&c);
                self.cnf.implies(wv, -occ[ti]);
            }
        }

        // one signal per tile side
        let used: Vec<i32> = (0..self.arcs.len()).map(|_| self.cnf.var()).collect();
        for a in 0..self.arcs.len() {
            for row in &x {
                if let Some(l) = row[a] {
                    self.cnf.implies(l, used[a]);
                }
            }
            if reverse[a].is_some_and(|r| r < a) {
                continue;
            }
            let mut lits: Vec<i32> = x.iter().filter_map(|row| row[a]).collect();
            if let Some(r) = reverse[a] {
                lits.extend(x.iter().filter_map(|row| row[r]));
            }
            self.cnf.at_most_one(&lits);
        }

        // latches
        if params.latches {
            let lat: Vec<Vec<i32>> = (0..tiles).map(|_| (0..n).map(|_| self.cnf.var()).collect()).collect();
            for ti in 0..tiles {
                self.cnf.exactly_one(&lat[ti]);
                self.cnf.implies(occ[ti], lat[ti][0]);
            }
            self.lat = Some(lat);
        }

        // clocks
        if !scheme.is_regular() {
            let clk: Vec<Vec<i32>> = (0..tiles).map(|_| (0..n).map(|_| self.cnf.var()).collect()).collect();
            for row in &clk {
                self.cnf.exactly_one(row);
            }
            if params.desync && tiles > 0 {
                // rotating all clocks preserves validity when timing is free
                self.cnf.unit(clk[0][0]);
            }
            for (a, arc) in self.arcs.iter().enumerate() {
                for k in 0..n {
                    match &self.lat {
                        None => self
                            .cnf
                            .clause(&[-used[a], -clk[arc.from][k], clk[arc.to][(k + 1) % n]]),
                        Some(lat) => {
                            for l in 0..n {
                                self.cnf.clause(&[
                                    -used[a],
                                    -clk[arc.from][k],
                                    -lat[arc.from][l],
                                    clk[arc.to][(k + 1 + l) % n],
                                ]);
                            }
                        }
                    }
                }
            }
            self.clk = Some(clk);
        } else if let Some(lat) = &self.lat {
            for (a, arc) in self.arcs.iter().enumerate() {
                let zf = scheme.clock_number(self.tile(arc.from)).unwrap() as usize;
                let zt = scheme.clock_number(self.tile(arc.to)).unwrap() as usize;
                let l = (zt + 2 * n - zf - 1) % n;
                self.cnf.implies(used[a], lat[arc.from][l]);
            }
        }

        // tile capacity and crossings
        let arc_index: BTreeMap<(usize, usize), usize> =
            self.arcs.iter().enumerate().map(|(a, h)| ((h.from, h.to), a)).collect();
        let (width, height) = (self.width, self.height);
        let mut cross = Vec::new();
        for ti in 0..tiles {
            let ws: Vec<i32> = (0..edges).map(|ei| w[ei][ti]).collect();
            if !params.crossings {
                self.cnf.at_most_one(&ws);
                continue;
            }
            let t = self.tile(ti);
            let arc_lit = |ei: usize, from: Tile, to: Tile| -> Option<i32> {
                let idx = |t: Tile| (t.x < width && t.y < height).then(|| (t.y * width + t.x) as usize);
                x[ei][*arc_index.get(&(idx(from)?, idx(to)?))?]
            };
            let mut straight = Vec::with_capacity(edges);
            for ei in 0..edges {
                let mut any = Vec::new();
                for (d1, d2) in [(Dir::W, Dir::E), (Dir::N, Dir::S)] {
                    let s = self.cnf.var();
                    any.push(s);
                    let a = t.step(d1);
                    let b = t.step(d2);
                    let in_a = a.and_then(|a| arc_lit(ei, a, t));
                    let in_b = b.and_then(|b| arc_lit(ei, b, t));
                    let out_a = a.and_then(|a| arc_lit(ei, t, a));
                    let out_b = b.and_then(|b| arc_lit(ei, t, b));
                    let mut c = vec![-s];
                    c.extend(in_a);
                    c.extend(in_b);
                    self.cnf.clause(&c);
                    if let Some(i) = in_a {
                        let mut c = vec![-s, -i];
                        c.extend(out_b);
                        self.cnf.clause(&c);
                    }
                    if let Some(i) = in_b {
                        let mut c = vec![-s, -i];
                        c.extend(out_a);
                        self.cnf.clause(&c);
                    }
                }
                straight.push(any);
            }
            let cr = self.cnf.var();
            cross.push(cr);
            for e1 in 0..edges {
                for e2 in e1 + 1..edges {
                    let (a, b) = (w[e1][ti], w[e2][ti]);
                    self.cnf.clause(&[-a, -b, straight[e1][0], straight[e1][1]]);
                    self.cnf.clause(&[-a, -b, straight[e2][0], straight[e2][1]]);
                    self.cnf.clause(&[-a, -b, cr]);
                    if let Some(lat) = &self.lat {
                        self.cnf.clause(&[-a, -b, lat[ti][0]]);
                    }
                }
            }
        }

        // wire length
        if let Some(limit) = params.wire_limit {
            for row in &w {
                self.cnf.at_most_k(row, limit);
            }
        }
        if let Some(k) = targets.wires {
            let all: Vec<i32> = w.iter().flatten().copied().collect();
            self.cnf.at_most_k(&all, k);
            self.cnf.at_least_k(&all, k);
        }
        if let Some(k) = targets.crossings {
            if params.crossings {
                // cr may be set spuriously; tie it to an actual pair
                for (ti, &cr) in cross.iter().enumerate() {
                    let mut c = vec![-cr];
                    for e1 in 0..edges {
                        for e2 in e1 + 1..edges {
                            let pair = self.cnf.var();
                            self.cnf.implies(pair, w[e1][ti]);
                            self.cnf.implies(pair, w[e2][ti]);
                            c.push(pair);
                        }
                    }
                    self.cnf.clause(&c);
                }
                self.cnf.at_most_k(&cross, k);
                self.cnf.at_least_k(&cross, k);
            } else if k > 0 {
                self.cnf.clause(&[]);
            }
        }

        if !params.desync {
            self.balance(&p, &slot, &x, &out_arcs, tiles);
        }
        self.p = p;
        self.x = x;
    }

    fn balance(
        &mut self,
        p: &[Vec<Option<i32>>],
        slot: &[Option<usize>],
        x: &[Vec<Option<i32>>],
        out_arcs: &[Vec<usize>],
        tiles: usize,
    ) {
        let net = self.net.clone();
        let scheme = self.params.scheme.clone();
        let n = scheme.phases as usize;
        let placed = |v: VertexId| slot[v.0].is_some();
        let pv = |v: VertexId, t: usize| slot[v.0].and_then(|i| p[i][t]);

        // which vertices carry input timing (constants do not)
        let mut timed = vec![false; net.vertex_count()];
        let mut source = vec![false; net.vertex_count()];
        for vx in net.vertices() {
            let v = vx.id;
            if !placed(v) {
                continue;
            }
            let external = vx.op == Op::Pi || net.fanins(v).any(|u| !placed(u) && net.op(u) == Op::Pi);
            let inner = net.fanins(v).any(|u| placed(u) && timed[u.0]);
            timed[v.0] = external || inner;
            source[v.0] = timed[v.0] && !inner;
        }
        let max_latch = if self.params.latches { n - 1 } else { 0 };
        let cycles = (2 * tiles * (1 + max_latch) + n).div_ceil(n) + 1;

        let mut vc: BTreeMap<usize, Vec<i32>> = BTreeMap::new();
        for vx in net.vertices() {
            if timed[vx.id.0] {
                let row: Vec<i32> = (0..cycles).map(|_| self.cnf.var()).collect();
                self.cnf.exactly_one(&row);
                if source[vx.id.0] {
                    self.cnf.unit(row[0]);
                }
                vc.insert(vx.id.0, row);
            }
        }

        for (ei, &e) in self.routed.clone().iter().enumerate() {
            let (u, v) = (net.edge(e).source, net.edge(e).target);
            if !timed[u.0] {
                continue;
            }
            let ts: Vec<Vec<i32>> = (0..tiles)
                .map(|_| (0..cycles).map(|_| self.cnf.var()).collect())
                .collect();
            for ti in 0..tiles {
                if let Some(pu) = pv(u, ti) {
                    for c in 0..cycles {
                        self.cnf.clause(&[-pu, -vc[&u.0][c], ts[ti][c]]);
                    }
                }
                if let Some(pt) = pv(v, ti) {
                    for c in 0..cycles {
                        self.cnf.clause(&[-pt, -ts[ti][c], vc[&v.0][c]]);
                    }
                }
                for &a in &out_arcs[ti] {
                    let Some(xa) = x[ei][a] else { continue };
                    let to = self.arcs[a].to;
                    for c in 0..cycles {
                        let step = |cnf: &mut Cnf, mut pre: Vec<i32>, inc: usize| {
                            pre.extend([-xa, -ts[ti][c]]);
                            if c + inc < cycles {
                                pre.push(ts[to][c + inc]);
                            }
                            cnf.clause(&pre);
                        };
                        match (&self.clk, &self.lat) {
                            (None, None) => {
                                let z = scheme.clock_number(self.tile(ti)).unwrap() as usize;
                                step(&mut self.cnf, vec![], usize::from(z + 1 >= n));
                            }
                            (None, Some(_)) => {
                                let z = scheme.clock_number(self.tile(ti)).unwrap() as usize;
                                let zt = scheme.clock_number(self.tile(to)).unwrap() as usize;
                                let l = (zt + 2 * n - z - 1) % n;
                                step(&mut self.cnf, vec![], usize::from(z + 1 + l >= n));
                            }
                            (Some(clk), None) => {
                                let last = clk[ti][n - 1];
                                step(&mut self.cnf, vec![-last], 1);
                                step(&mut self.cnf, vec![last], 0);
                            }
                            (Some(clk), Some(lat)) => {
                                for (k, &ck) in clk[ti].iter().enumerate() {
                                    for (l, &ll) in lat[ti].iter().enumerate() {
                                        step(&mut self.cnf, vec![-ck, -ll], usize::from(k + 1 + l >= n));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// Turns a model into a layout. Stray wire loops that are not part of a
    /// source-to-target path are dropped.
    pub fn decode(&self, model: impl Fn(i32) -> bool) -> GateLayout {
        let net = self.net.clone();
        let mut layout = GateLayout::new(self.width, self.height, self.params.scheme.clone(), net.clone());
        layout.set_allow_crossings(self.params.crossings);
        let tiles = (self.width * self.height) as usize;
        let mut at = vec![None; net.vertex_count()];
        for (i, &v) in self.placeable.iter().enumerate() {
            let ti = (0..tiles)
                .find(|&t| self.p[i][t].is_some_and(&model))
                .expect("every vertex is placed");
            at[v.0] = Some(ti);
            layout
                .assign_logic_vertex(self.tile(ti), v)
                .expect("model places on free tiles");
        }

        let mut segments: BTreeMap<usize, Vec<(EdgeId, Dir, Dir)>> = BTreeMap::new();
        for (ei, &e) in self.routed.iter().enumerate() {
            let (u, v) = (net.edge(e).source, net.edge(e).target);
            let (src, dst) = (at[u.0].unwrap(), at[v.0].unwrap());
            let next = |t: usize| {
                self.arcs
                    .iter()
                    .enumerate()
                    .find(|(a, arc)| arc.from == t && self.x[ei][*a].is_some_and(&model))
                    .map(|(_, arc)| *arc)
                    .expect("flow continues")
            };
            let mut arc = next(src);
            while arc.to != dst {
                let out = next(arc.to);
                segments
                    .entry(arc.to)
                    .or_default()
                    .push((e, arc.dir.opposite(), out.dir));
                arc = out;
            }
        }
        for (ti, segs) in segments {
            let t = self.tile(ti);
            let mut segs = segs;
            // horizontal wire on the ground layer, vertical one crosses over
            segs.sort_by_key(|&(_, entry, _)| !entry.is_horizontal());
            for (i, (e, entry, exit)) in segs.into_iter().enumerate() {
                let layer = if i == 0 { Layer::Ground } else { Layer::Crossing };
                layout
                    .assign_wire(t, e, layer, entry, exit)
                    .expect("model respects tile capacity");
            }
        }
        if let Some(clk) = &self.clk {
            for (ti, row) in clk.iter().enumerate() {
                let z = row.iter().position(|&l| model(l)).expect("one clock per tile");
                layout.assign_clock(self.tile(ti), z as u8).expect("clock in range");
            }
        }
        if let Some(lat) = &self.lat {
            for (ti, row) in lat.iter().enumerate() {
                let d = row.iter().position(|&l| model(l)).expect("one latch value per tile");
                let t = self.tile(ti);
                if d > 0 && layout.wires_at(t).len() == 1 {
                    layout.assign_latch(t, d as u8).expect("delay in range");
                }
            }
        }
        layout
    }
}

impl Encoding {
    /// Placement literals that hold in `layout`; their negated disjunction
    /// excludes this placement from further models.
    pub fn placement_literals(&self, layout: &GateLayout) -> Vec<i32> {
        let mut lits = Vec::new();
        for (i, &v) in self.placeable.iter().enumerate() {
            if let Some(t) = layout.tile_of(v) {
                if let Some(l) = self.p[i][(t.y * self.width + t.x) as usize] {
                    lits.push(l);
                }
            }
        }
        lits
    }
}
