//! Time grids and time-expanded networks over fragments or events.
//!
//! Node times are service-start times. A copy of an element leaving at grid
//! time `t` reaches its head at the earliest feasible time `t'`, which is
//! lifted to the head's earliest time and then rounded down to the head's
//! grid. Rounding down only shortens arcs, so any grid yields a relaxation.

use std::collections::HashMap;

use crate::events::{cap, EventNetwork};
use crate::fragments::FragmentSet;
use crate::instance::{Instance, Loc, EPS};
use crate::schedule::{schedule_path, StartRule};

/// Sorted time points per location.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    pub times: Vec<Vec<f64>>,
    /// Step of a fixed grid; `None` once points have been inserted.
    pub resolution: Option<f64>,
}

impl TimeGrid {
    /// `{e, e+Δ, e+2Δ, ...} ∩ [e, l]` plus `l` at every location.
    pub fn fixed(inst: &Instance, delta: f64) -> Self {
        assert!(delta > 0.0, "grid step must be positive");
        let times = (0..inst.num_locations())
            .map(|p| {
                let (e, l) = (inst.early(p), inst.late(p));
                let mut ts = Vec::new();
                let mut k = 0u64;
                loop {
                    let t = e + k as f64 * delta;
                    if t > l + EPS {
                        break;
                    }
                    ts.push(t.min(l));
                    k += 1;
                }
                if (ts.last().unwrap() - l).abs() > EPS {
                    ts.push(l);
                }
                ts
            })
            .collect();
        TimeGrid {
            times,
            resolution: Some(delta),
        }
    }

    /// The coarse grid DDD starts from.
    pub fn initial(inst: &Instance) -> Self {
        TimeGrid::fixed(inst, 50.0)
    }

    pub fn at(&self, loc: Loc) -> &[f64] {
        &self.times[loc]
    }

    /// Largest grid time at `loc` not after `max(t, e_loc)`; `None` if that
    /// time lies beyond the window.
    pub fn round_down(&self, inst: &Instance, loc: Loc, t: f64) -> Option<f64> {
        let t = t.max(inst.early(loc));
        if t > inst.late(loc) + EPS {
            return None;
        }
        let ts = &self.times[loc];
        let k = ts.partition_point(|&g| g <= t + EPS);
        Some(ts[k.max(1) - 1])
    }

    /// Inserts `t` at `loc` if it is inside the window and not already
    /// present (within tolerance). Returns whether the grid grew.
    pub fn insert(&mut self, inst: &Instance, loc: Loc, t: f64) -> bool {
        if t < inst.early(loc) - EPS || t > inst.late(loc) + EPS {
            return false;
        }
        let ts = &mut self.times[loc];
        let k = ts.partition_point(|&g| g < t);
        let near = |idx: usize| idx < ts.len() && (ts[idx] - t).abs() <= EPS;
        if near(k) || (k > 0 && near(k - 1)) {
            return false;
        }
        ts.insert(k, t);
        self.resolution = None;
        true
    }

    pub fn total_points(&self) -> usize {
        self.times.iter().map(Vec::len).sum()
    }

    /// Whether every point of `self` is present in `other`.
    pub fn is_subset_of(&self, other: &TimeGrid) -> bool {
        self.times
            .iter()
            .zip(&other.times)
            .all(|(a, b)| a.iter().all(|t| b.iter().any(|u| (u - t).abs() <= EPS)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// A fragment, by id in the fragment set.
    Fragment(usize),
    /// A physical location arc used as a node arc.
    LocArc(Loc, Loc),
    /// An event arc, by id in the event network.
    EventArc(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Move(Element),
    Idle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TsNode {
    pub loc: Loc,
    /// Event id in event mode.
    pub event: Option<usize>,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TsEdge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    /// Departure time (tail node time).
    pub depart: f64,
    /// Rounded arrival time (head node time).
    pub arrive: f64,
    /// Earliest feasible arrival before rounding.
    pub exact: f64,
    /// Vehicles moving together (fragments) or the cap on the arc.
    pub vehicles: usize,
    pub cost: f64,
}

impl TsEdge {
    pub fn discrepancy(&self) -> f64 {
        (self.exact - self.arrive).max(0.0)
    }

    pub fn length(&self) -> f64 {
        self.arrive - self.depart
    }

    pub fn element(&self) -> Option<Element> {
        match self.kind {
            EdgeKind::Move(e) => Some(e),
            EdgeKind::Idle => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Fragments,
    Events,
}

#[derive(Clone, Debug)]
pub struct TimeSpaceNetwork {
    pub mode: Mode,
    pub nodes: Vec<TsNode>,
    pub edges: Vec<TsEdge>,
    pub out: Vec<Vec<usize>>,
    pub inc: Vec<Vec<usize>>,
    pub source: usize,
    pub sink: usize,
}

struct Builder {
    nodes: Vec<TsNode>,
    edges: Vec<TsEdge>,
    /// (key, time bits) -> node id, where key is a location or event.
    lookup: HashMap<(usize, u64), usize>,
}

impl Builder {
    fn node(&mut self, key: usize, loc: Loc, event: Option<usize>, t: f64) -> usize {
        let nodes = &mut self.nodes;
        *self.lookup.entry((key, t.to_bits())).or_insert_with(|| {
            nodes.push(TsNode { loc, event, t });
            nodes.len() - 1
        })
    }

    fn finish(self, mode: Mode, source: usize, sink: usize) -> TimeSpaceNetwork {
        let mut out = vec![Vec::new(); self.nodes.len()];
        let mut inc = vec![Vec::new(); self.nodes.len()];
        for (k, e) in self.edges.iter().enumerate() {
            out[e.from].push(k);
            inc[e.to].push(k);
        }
        TimeSpaceNetwork {
            mode,
            nodes: self.nodes,
            edges: self.edges,
            out,
            inc,
            source,
            sink,
        }
    }
}

impl TimeSpaceNetwork {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn moves(&self) -> impl Iterator<Item = (usize, &TsEdge)> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind != EdgeKind::Idle)
    }
}

/// Copies of each fragment per feasible start time, node arcs between
/// delivery and pickup nodes, and idle arcs.
pub fn expand_fragments(inst: &Instance, frags: &FragmentSet, grid: &TimeGrid) -> TimeSpaceNetwork {
    let mut b = Builder {
        nodes: Vec::new(),
        edges: Vec::new(),
        lookup: HashMap::new(),
    };
    let sink_loc = inst.sink();
    let e0 = inst.early(0);
    let source = b.node(0, 0, None, e0);
    let sink = b.node(sink_loc, sink_loc, None, inst.late(sink_loc));

    let mut starts = vec![false; inst.num_locations()];
    let mut ends = vec![false; inst.num_locations()];
    for f in &frags.fragments {
        starts[f.start()] = true;
        ends[f.end()] = true;
    }
    for loc in 1..=2 * inst.n {
        if !(starts[loc] || ends[loc]) {
            continue;
        }
        let ts = grid.at(loc);
        for &t in ts {
            b.node(loc, loc, None, t);
        }
        for w in ts.windows(2) {
            let (a, c) = (b.node(loc, loc, None, w[0]), b.node(loc, loc, None, w[1]));
            b.edges.push(TsEdge {
                from: a,
                to: c,
                kind: EdgeKind::Idle,
                depart: w[0],
                arrive: w[1],
                exact: w[1],
                vehicles: usize::MAX,
                cost: 0.0,
            });
        }
    }

    for (fid, f) in frags.fragments.iter().enumerate() {
        let (p, d) = (f.start(), f.end());
        let ts = grid.at(p);
        for (k, &t) in ts.iter().enumerate() {
            let Some(s) = schedule_path(inst, &f.path, StartRule::NotBefore(t)) else {
                break;
            };
            // a copy that cannot start before the next grid point is dominated
            if k + 1 < ts.len() && s.start() >= ts[k + 1] - EPS {
                continue;
            }
            let exact = s.end();
            let arrive = grid
                .round_down(inst, d, exact)
                .expect("scheduled end inside window");
            let from = b.node(p, p, None, t);
            let to = b.node(d, d, None, arrive);
            b.edges.push(TsEdge {
                from,
                to,
                kind: EdgeKind::Move(Element::Fragment(fid)),
                depart: t,
                arrive,
                exact,
                vehicles: f.vehicles,
                cost: f.cost,
            });
        }
    }

    // node arcs: origin -> pickups, deliveries -> pickups, deliveries -> sink
    let pickups: Vec<Loc> = inst.pickups().filter(|&p| starts[p]).collect();
    let deliveries: Vec<Loc> = (inst.n + 1..=2 * inst.n).filter(|&d| ends[d]).collect();
    let mut tails: Vec<(Loc, f64, usize)> = vec![(0, e0, source)];
    for &d in &deliveries {
        for &t in grid.at(d) {
            tails.push((d, t, b.node(d, d, None, t)));
        }
    }
    for (i, t, from) in tails {
        for &p in &pickups {
            if !inst.arc_allowed(i, p) {
                continue;
            }
            let exact = (t + inst.time(i, p)).max(inst.early(p));
            if let Some(arrive) = grid.round_down(inst, p, exact) {
                let to = b.node(p, p, None, arrive);
                b.edges.push(TsEdge {
                    from,
                    to,
                    kind: EdgeKind::Move(Element::LocArc(i, p)),
                    depart: t,
                    arrive,
                    exact,
                    vehicles: cap(inst, i, p),
                    cost: inst.cost(i, p),
                });
            }
        }
        if i != 0 {
            let exact = t + inst.time(i, sink_loc);
            if exact <= inst.late(sink_loc) + EPS {
                b.edges.push(TsEdge {
                    from,
                    to: sink,
                    kind: EdgeKind::Move(Element::LocArc(i, sink_loc)),
                    depart: t,
                    arrive: exact,
                    exact,
                    vehicles: cap(inst, i, sink_loc),
                    cost: inst.cost(i, sink_loc),
                });
            }
        }
    }
    b.finish(Mode::Fragments, source, sink)
}

/// Copies of each event arc per departure time, plus idle arcs per event.
pub fn expand_events(inst: &Instance, net: &EventNetwork, grid: &TimeGrid) -> TimeSpaceNetwork {
    let mut b = Builder {
        nodes: Vec::new(),
        edges: Vec::new(),
        lookup: HashMap::new(),
    };
    let sink_loc = inst.sink();
    let e0 = inst.early(0);
    let source = b.node(net.source, 0, Some(net.source), e0);
    let sink = b.node(net.sink, sink_loc, Some(net.sink), inst.late(sink_loc));

    for (u, ev) in net.events.iter().enumerate() {
        if u == net.source || u == net.sink {
            continue;
        }
        let ts = grid.at(ev.loc);
        for &t in ts {
            b.node(u, ev.loc, Some(u), t);
        }
        for w in ts.windows(2) {
            let (a, c) = (
                b.node(u, ev.loc, Some(u), w[0]),
                b.node(u, ev.loc, Some(u), w[1]),
            );
            b.edges.push(TsEdge {
                from: a,
                to: c,
                kind: EdgeKind::Idle,
                depart: w[0],
                arrive: w[1],
                exact: w[1],
                vehicles: usize::MAX,
                cost: 0.0,
            });
        }
    }

    for (aid, a) in net.arcs.iter().enumerate() {
        let departures: Vec<f64> = if a.from == net.source {
            vec![e0]
        } else {
            grid.at(a.i).to_vec()
        };
        for t in departures {
            let from = if a.from == net.source {
                source
            } else {
                b.node(a.from, a.i, Some(a.from), t)
            };
            let (to, arrive, exact) = if a.to == net.sink {
                let exact = t + inst.time(a.i, a.j);
                if exact > inst.late(sink_loc) + EPS {
                    continue;
                }
                (sink, exact, exact)
            } else {
                let exact = (t + inst.time(a.i, a.j)).max(inst.early(a.j));
                let Some(arrive) = grid.round_down(inst, a.j, exact) else {
                    continue;
                };
                (b.node(a.to, a.j, Some(a.to), arrive), arrive, exact)
            };
            b.edges.push(TsEdge {
                from,
                to,
                kind: EdgeKind::Move(Element::EventArc(aid)),
                depart: t,
                arrive,
                exact,
                vehicles: a.cap,
                cost: a.cost,
            });
        }
    }
    b.finish(Mode::Events, source, sink)
}
