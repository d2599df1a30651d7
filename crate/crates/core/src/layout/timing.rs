//! Critical path and throughput.
//!
//! Every signal carries an interval of phase times: the earliest and latest
//! moment, counted in clock phases from the first input, at which the data
//! of one input vector can reach a tile. A hop costs one phase plus the
//! latch delay of the tile it leaves. Inputs are applied at the phase of
//! their tile, constants are stable and carry no interval. When the spread
//! at an output spans `D` whole clock cycles, successive vectors must be
//! `1 + D` cycles apart, hence a throughput of `1/(1 + D)`.

use std::collections::BTreeMap;
use std::fmt;

use super::{EdgeRoute, GateLayout, LayoutError};
use crate::network::{EdgeId, Op};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arrival {
    pub early: u64,
    pub late: u64,
}

impl Arrival {
    fn at(t: u64) -> Self {
        Arrival { early: t, late: t }
    }

    fn shift(self, d: u64) -> Self {
        Arrival {
            early: self.early + d,
            late: self.late + d,
        }
    }

    fn merge(self, o: Arrival) -> Self {
        Arrival {
            early: self.early.min(o.early),
            late: self.late.max(o.late),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Throughput {
    pub denominator: u32,
}

impl fmt::Display for Throughput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}", self.denominator)
    }
}

pub(super) struct Timing {
    pub critical_path: usize,
    pub throughput: Throughput,
}

impl GateLayout {
    fn valid_routes(&self) -> Result<Vec<EdgeRoute>, LayoutError> {
        let violations = self.check_validity();
        if let Some(v) = violations.first() {
            return Err(LayoutError::Invalid(v.to_string()));
        }
        self.routes().map_err(|v| LayoutError::Invalid(v[0].to_string()))
    }

    /// Phase delay of a route from its source tile to its target tile.
    fn route_delay(&self, r: &EdgeRoute) -> u64 {
        r.source
            .into_iter()
            .chain(r.wires.iter().copied())
            .map(|t| 1 + self.latch(t) as u64)
            .sum()
    }

    pub(super) fn timing(&self) -> Result<Timing, LayoutError> {
        let routes = self.valid_routes()?;
        let by_edge: BTreeMap<EdgeId, &EdgeRoute> = routes.iter().map(|r| (r.edge, r)).collect();
        let net = &self.network;
        let n = self.scheme.phases as u64;

        let mut length = vec![0usize; net.vertex_count()];
        let mut arrival: Vec<Option<Arrival>> = vec![None; net.vertex_count()];
        let mut spread = 0u64;
        // vertex ids are topological
        for vx in net.vertices() {
            let v = vx.id;
            let Some(tile) = self.tile_of(v) else { continue };
            let mut len = 0;
            let mut arr: Option<Arrival> = None;
            let mut driven_externally = vx.op == Op::Pi;
            for &e in net.fanin_edges(v) {
                let r = by_edge[&e];
                let src = net.edge(e).source;
                if r.source.is_none() {
                    driven_externally = true;
                    continue;
                }
                len = len.max(length[src.0] + r.wires.len());
                if let Some(a) = arrival[src.0] {
                    let a = a.shift(self.route_delay(r));
                    arr = Some(arr.map_or(a, |b| b.merge(a)));
                }
            }
            if arr.is_none() && driven_externally {
                arr = Some(Arrival::at(self.clock(tile).expect("valid layout has clocks") as u64));
            }
            length[v.0] = len + 1;
            arrival[v.0] = arr;

            let observed = vx.op == Op::Po || net.fanout_edges(v).iter().any(|e| by_edge[e].target.is_none());
            if let (true, Some(a)) = (observed, arr) {
                spread = spread.max(a.late - a.early);
            }
        }
        Ok(Timing {
            critical_path: length.into_iter().max().unwrap_or(0),
            throughput: Throughput {
                denominator: 1 + (spread / n) as u32,
            },
        })
    }

    /// Longest data path in tiles, counting both endpoints.
    pub fn critical_path(&self) -> Result<usize, LayoutError> {
        Ok(self.timing()?.critical_path)
    }

    pub fn throughput(&self) -> Result<Throughput, LayoutError> {
        Ok(self.timing()?.throughput)
    }
}
