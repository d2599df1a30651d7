//! Exact, area-minimal placement and routing.
//!
//! Grid sizes are tried in order of increasing area; each one is encoded as
//! a SAT instance (see [`encode`]) and handed to CaDiCaL. The first
//! satisfiable size yields the layout.

pub mod cnf;
pub mod encode;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use cadical::{Callbacks, Solver};
use thiserror::Error;

pub use encode::{Encoding, Targets};

use crate::clocking::ClockingScheme;
use crate::layout::GateLayout;
use crate::network::{LogicNetwork, Op, VertexId};

#[derive(Clone, Debug, PartialEq)]
pub struct ExactParams {
    pub scheme: ClockingScheme,
    pub crossings: bool,
    pub io_pins: bool,
    pub border_io: bool,
    /// Allow unbalanced reconverging paths.
    pub desync: bool,
    pub latches: bool,
    /// Maximum number of wire tiles per edge.
    pub wire_limit: Option<usize>,
    /// Budget for the whole search.
    pub timeout: Option<Duration>,
    /// Budget per grid size; derived from `timeout` when absent.
    pub instance_timeout: Option<Duration>,
    /// Largest grid area to try.
    pub upper_bound: Option<u64>,
    /// Grid sizes solved concurrently; 1 is sequential and deterministic.
    pub threads: usize,
    /// Vertex functions the target gate library implements.
    pub supported: Vec<Op>,
}

impl Default for ExactParams {
    fn default() -> Self {
        ExactParams {
            scheme: ClockingScheme::two_d_d_wave(4),
            crossings: false,
            io_pins: false,
            border_io: false,
            desync: false,
            latches: false,
            wire_limit: None,
            timeout: None,
            instance_timeout: None,
            upper_bound: None,
            threads: 1,
            supported: crate::techmap::QCA_ONE_OPS.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Found,
    UnsatUpToBound,
    Timeout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Sat,
    Unsat,
    Timeout,
    /// Abandoned because a smaller grid already succeeded.
    Cancelled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Explored {
    pub width: u32,
    pub height: u32,
    pub outcome: Outcome,
    pub runtime: Duration,
}

#[derive(Clone, Debug)]
pub struct ExactResult {
    pub layout: Option<GateLayout>,
    pub status: Status,
    pub explored: Vec<Explored>,
    pub runtime: Duration,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("the gate library has no `{0}` gate; lower the network first")]
    Unsupported(Op),
    #[error("vertex {0} drives more signals than its tile allows; substitute fan-outs first")]
    NotSubstituted(VertexId),
    #[error("an input drives an output directly, which needs I/O pins")]
    DirectPinEdge,
    #[error("the network has nothing to place")]
    Empty,
    #[error("{vertices} vertices do not fit into {bound} tiles")]
    TooSmall { vertices: usize, bound: u64 },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Grid sizes with at least `n` tiles in order of non-decreasing area; ties
/// prefer squarer grids, then the narrower one.
pub fn dimension_sequence(n: usize, upper_bound: Option<u64>) -> impl Iterator<Item = (u32, u32)> {
    let mut area = n.max(1) as u64;
    let mut pending: Vec<(u32, u32)> = Vec::new();
    std::iter::from_fn(move || loop {
        if let Some(d) = pending.pop() {
            return Some(d);
        }
        if upper_bound.is_some_and(|b| area > b) {
            return None;
        }
        let mut dims: Vec<(u32, u32)> = (1..=area)
            .filter(|w| area.is_multiple_of(*w))
            .map(|w| (w as u32, (area / w) as u32))
            .collect();
        dims.sort_by_key(|&(w, h)| (w.abs_diff(h), w > h));
        dims.reverse();
        pending = dims;
        area += 1;
    })
}

struct Abort {
    deadline: Option<Instant>,
    index: usize,
    best: Arc<AtomicUsize>,
}

impl Callbacks for Abort {
    fn terminate(&mut self) -> bool {
        self.best.load(Ordering::Relaxed) < self.index || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

fn validate(net: &LogicNetwork, params: &ExactParams) -> Result<usize, ExactError> {
    if params.border_io && !params.io_pins {
        return Err(ExactError::Params("border I/O requires I/O pins".into()));
    }
    if params.wire_limit == Some(0) {
        return Err(ExactError::Params("the wire limit must be at least 1".into()));
    }
    params
        .scheme
        .validate()
        .map_err(|e| ExactError::Params(e.to_string()))?;
    for v in net.vertices() {
        if !params.supported.contains(&v.op) {
            return Err(ExactError::Unsupported(v.op));
        }
        let outs = net.fanout_edges(v.id).len();
        if outs > 1 && !(v.op == Op::Fanout && outs + v.op.arity() <= 4) {
            return Err(ExactError::NotSubstituted(v.id));
        }
    }
    if !params.io_pins
        && net
            .edges()
            .iter()
            .any(|e| net.op(e.source) == Op::Pi && net.op(e.target) == Op::Po)
    {
        return Err(ExactError::DirectPinEdge);
    }
    let n = net
        .vertices()
        .iter()
        .filter(|v| params.io_pins || !v.op.is_io())
        .count();
    if n == 0 {
        return Err(ExactError::Empty);
    }
    if let Some(b) = params.upper_bound {
        if (n as u64) > b {
            return Err(ExactError::TooSmall { vertices: n, bound: b });
        }
    }
    Ok(n)
}

fn run_instance(
    net: &Arc<LogicNetwork>,
    params: &ExactParams,
    (w, h): (u32, u32),
    targets: &Targets,
    abort: Abort,
) -> Result<(Outcome, Option<GateLayout>), ExactError> {
    let best = abort.best.clone();
    let index = abort.index;
    let enc = Encoding::new(net.clone(), params, w, h, targets);
    let mut solver: Solver<Abort> = Solver::new();
    for c in enc.cnf.clauses() {
        solver.add_clause(c.iter().copied());
    }
    solver.set_callbacks(Some(abort));
    match solver.solve() {
        Some(true) => {
            let layout = enc.decode(|l| solver.value(l) == Some(true));
            let violations = layout.check_validity();
            if let Some(v) = violations.first() {
                return Err(ExactError::Internal(format!(
                    "decoded {w} x {h} layout is invalid: {v}"
                )));
            }
            Ok((Outcome::Sat, Some(layout)))
        }
        Some(false) => Ok((Outcome::Unsat, None)),
        None if best.load(Ordering::Relaxed) < index => Ok((Outcome::Cancelled, None)),
        None => Ok((Outcome::Timeout, None)),
    }
}

/// Solves a single grid size. Used by the driver and by tests that compare
/// the encoding against other oracles.
pub fn solve_instance(
    net: &LogicNetwork,
    params: &ExactParams,
    width: u32,
    height: u32,
    targets: &Targets,
    timeout: Option<Duration>,
) -> Result<(Outcome, Option<GateLayout>), ExactError> {
    validate(net, params)?;
    let abort = Abort {
        deadline: timeout.map(|t| Instant::now() + t),
        index: 0,
        best: Arc::new(AtomicUsize::new(usize::MAX)),
    };
    let mut layout = run_instance(&Arc::new(net.clone()), params, (width, height), targets, abort)?;
    if let Some(l) = layout.1.as_mut() {
        l.set_name(net.name());
    }
    Ok(layout)
}

/// Outcome, layout and runtime of one grid size.
type Solved = (Outcome, Option<GateLayout>, Duration);

pub fn exact_layout(net: &LogicNetwork, params: &ExactParams) -> Result<ExactResult, ExactError> {
    exact_layout_with(net, params, &Targets::default())
}

/// Like [`exact_layout`], additionally pinning the total wire and crossing
/// counts.
pub fn exact_layout_with(
    net: &LogicNetwork,
    params: &ExactParams,
    targets: &Targets,
) -> Result<ExactResult, ExactError> {
    let start = Instant::now();
    let n = validate(net, params)?;
    let shared = Arc::new(net.clone());
    let edges = net.edge_count();
    let cap = params
        .upper_bound
        .unwrap_or(((net.vertex_count() + edges).pow(2) as u64).max(n as u64));
    let dims: Vec<(u32, u32)> = dimension_sequence(n, Some(cap)).collect();
    let global_deadline = params.timeout.map(|t| start + t);
    let per_instance = |now: Instant| -> Option<Instant> {
        let own = params
            .instance_timeout
            .or_else(|| match (params.timeout, params.upper_bound) {
                (Some(t), Some(_)) => Some(t / dims.len().max(1) as u32),
                _ => None,
            })
            .map(|t| now + t);
        match (own, global_deadline) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    };

    let best = Arc::new(AtomicUsize::new(usize::MAX));
    let results: Mutex<Vec<Option<Solved>>> = Mutex::new(vec![None; dims.len()]);
    let first_error: Mutex<Option<ExactError>> = Mutex::new(None);
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= dims.len() || i > best.load(Ordering::SeqCst) {
            break;
        }
        if global_deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let t0 = Instant::now();
        let abort = Abort {
            deadline: per_instance(t0),
            index: i,
            best: best.clone(),
        };
        match run_instance(&shared, params, dims[i], targets, abort) {
            Ok((outcome, layout)) => {
                if outcome == Outcome::Sat {
                    best.fetch_min(i, Ordering::SeqCst);
                }
                results.lock().unwrap()[i] = Some((outcome, layout, t0.elapsed()));
            }
            Err(e) => {
                first_error.lock().unwrap().get_or_insert(e);
                best.fetch_min(0, Ordering::SeqCst);
                break;
            }
        }
    };
    if params.threads <= 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..params.threads {
                s.spawn(worker);
            }
        });
    }
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }

    let mut explored = Vec::new();
    let mut found = None;
    let mut timed_out = global_deadline.is_some_and(|d| Instant::now() >= d);
    for (i, r) in results.into_inner().unwrap().into_iter().enumerate() {
        let Some((outcome, layout, runtime)) = r else { continue };
        if found.is_some() {
            break;
        }
        explored.push(Explored {
            width: dims[i].0,
            height: dims[i].1,
            outcome,
            runtime,
        });
        match outcome {
            Outcome::Sat => found = layout,
            Outcome::Timeout => timed_out = true,
            _ => {}
        }
    }
    let status = match (&found, timed_out) {
        (Some(_), _) => Status::Found,
        (None, true) => Status::Timeout,
        (None, false) => Status::UnsatUpToBound,
    };
    if let Some(l) = found.as_mut() {
        l.set_name(net.name());
    }
    Ok(ExactResult {
        layout: found,
        status,
        explored,
        runtime: start.elapsed(),
    })
}
