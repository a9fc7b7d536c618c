//! Event-based network: nodes are `(location, onboard set)` pairs.
//!
//! At a pickup event `(i, S)` the set `S` holds the customers already on
//! board when `i` is picked up; at a delivery event `(j, S)` it holds those
//! still on board after `j` is served. The depots carry the empty set.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write;

use crate::instance::{Instance, Loc, Matrix, EPS};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    pub loc: Loc,
    /// Sorted pickup ids.
    pub onboard: Vec<Loc>,
}

impl Event {
    pub fn new(loc: Loc, mut onboard: Vec<Loc>) -> Self {
        onboard.sort_unstable();
        Event { loc, onboard }
    }

    /// Customers on board right after service at this event.
    pub fn carried(&self, inst: &Instance) -> Vec<Loc> {
        let mut c = self.onboard.clone();
        if inst.is_pickup(self.loc) {
            c.push(self.loc);
            c.sort_unstable();
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventArc {
    pub from: usize,
    pub to: usize,
    pub i: Loc,
    pub j: Loc,
    pub cost: f64,
    /// Maximum number of vehicles on the arc.
    pub cap: usize,
}

#[derive(Clone, Debug, Default)]
pub struct EventNetwork {
    pub events: Vec<Event>,
    pub arcs: Vec<EventArc>,
    pub out: Vec<Vec<usize>>,
    pub inc: Vec<Vec<usize>>,
    /// Arc ids grouped by location arc.
    pub by_loc_arc: BTreeMap<(Loc, Loc), Vec<usize>>,
    pub source: usize,
    pub sink: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EventOptions {
    /// Apply time-window and ride-time pruning.
    pub prune: bool,
}

impl Default for EventOptions {
    fn default() -> Self {
        EventOptions { prune: true }
    }
}

/// Vehicle cap on a location arc: `min(ceil|q_i|/Q, ceil|q_j|/Q)`, with the
/// depot side ignored.
pub fn cap(inst: &Instance, i: Loc, j: Loc) -> usize {
    match (inst.is_depot(i), inst.is_depot(j)) {
        (true, true) => 1,
        (true, false) => inst.vehicles_needed(j),
        (false, true) => inst.vehicles_needed(i),
        (false, false) => inst.vehicles_needed(i).min(inst.vehicles_needed(j)),
    }
}

/// Successor events of `u` allowed by capacity and the transition rules.
fn successors(inst: &Instance, u: &Event) -> Vec<Event> {
    let n = inst.n;
    let carried = u.carried(inst);
    let load: i64 = carried.iter().map(|&k| inst.load(k)).sum();
    let mut out = Vec::new();
    if u.loc == inst.sink() {
        return out;
    }
    if inst.is_pickup(u.loc) && inst.is_large(u.loc) {
        out.push(Event::new(u.loc + n, Vec::new()));
        return out;
    }
    for j in inst.pickups() {
        if carried.contains(&j) || !inst.arc_allowed(u.loc, j) {
            continue;
        }
        if inst.is_large(j) && !carried.is_empty() {
            continue;
        }
        if load + inst.load(j) > inst.capacity && !inst.is_large(j) {
            continue;
        }
        out.push(Event::new(j, carried.clone()));
    }
    for &k in &carried {
        let d = k + n;
        if !inst.arc_allowed(u.loc, d) {
            continue;
        }
        let rest: Vec<Loc> = carried.iter().copied().filter(|&x| x != k).collect();
        out.push(Event::new(d, rest));
    }
    if carried.is_empty() && inst.is_delivery(u.loc) {
        out.push(Event::new(inst.sink(), Vec::new()));
    }
    out
}

/// Earliest possible service start at `u`, given that every customer in
/// `onboard` was picked up before and the vehicle left the origin.
fn earliest_at(inst: &Instance, sp: &Matrix, u: &Event) -> f64 {
    let mut t = inst.early(u.loc).max(inst.early(0) + sp.get(0, u.loc));
    for &k in &u.onboard {
        t = t.max(inst.early(k) + sp.get(k, u.loc));
    }
    t
}

/// Time-window and ride-time lower-bound test for traversing `u -> v`.
fn arc_survives(inst: &Instance, sp: &Matrix, u: &Event, v: &Event) -> bool {
    let (i, j) = (u.loc, v.loc);
    let ti = earliest_at(inst, sp, u);
    if ti > inst.late(i) + EPS {
        return false;
    }
    let tj = (ti + inst.time(i, j)).max(inst.early(j));
    if tj > inst.late(j) + EPS {
        return false;
    }
    if j == inst.sink() {
        return true;
    }
    if tj + sp.get(j, inst.sink()) > inst.late(inst.sink()) + EPS {
        return false;
    }
    // customers on board across the arc
    let carried = u.carried(inst);
    for &k in &carried {
        let d = k + inst.n;
        let to_d = if j == d { 0.0 } else { sp.get(j, d) };
        if tj + to_d > inst.late(d) + EPS {
            return false;
        }
        let from_p = if i == k { 0.0 } else { sp.get(k, i) };
        if from_p + inst.time(i, j) + to_d > inst.ride(k) + EPS {
            return false;
        }
    }
    // customers picked up at j must still reach their delivery
    if inst.is_pickup(j) {
        let d = j + inst.n;
        if tj + inst.time(j, d).min(sp.get(j, d)) > inst.late(d) + EPS {
            return false;
        }
    }
    true
}

/// Enumerates the event network with default pruning.
pub fn enumerate_events(inst: &Instance) -> EventNetwork {
    enumerate_events_with(inst, EventOptions::default())
}

pub fn enumerate_events_with(inst: &Instance, opts: EventOptions) -> EventNetwork {
    let sp = inst.time_closure();
    let origin = Event::new(0, Vec::new());
    let mut index: HashMap<Event, usize> = HashMap::new();
    let mut events = vec![origin.clone()];
    index.insert(origin, 0);
    let mut raw_arcs: Vec<(usize, usize)> = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(u) = queue.pop_front() {
        let ev = events[u].clone();
        for v in successors(inst, &ev) {
            if opts.prune && !arc_survives(inst, &sp, &ev, &v) {
                continue;
            }
            let id = match index.get(&v) {
                Some(&id) => id,
                None => {
                    events.push(v.clone());
                    index.insert(v, events.len() - 1);
                    queue.push_back(events.len() - 1);
                    events.len() - 1
                }
            };
            raw_arcs.push((u, id));
        }
    }

    // keep events on some origin-to-sink path
    let sink_event = Event::new(inst.sink(), Vec::new());
    let mut keep = vec![false; events.len()];
    if let Some(&s) = index.get(&sink_event) {
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); events.len()];
        for &(a, b) in &raw_arcs {
            rev[b].push(a);
        }
        keep[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in &rev[x] {
                if !keep[y] {
                    keep[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    let mut kept: Vec<Event> = events
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(e, _)| e.clone())
        .collect();
    // both depots stay even when no route exists
    let origin = Event::new(0, Vec::new());
    if !kept.contains(&origin) {
        kept.push(origin);
    }
    if !kept.contains(&sink_event) {
        kept.push(sink_event);
    }
    kept.sort();
    let new_id: HashMap<&Event, usize> = kept.iter().enumerate().map(|(k, e)| (e, k)).collect();
    let mut arcs: Vec<EventArc> = raw_arcs
        .iter()
        .filter(|&&(a, b)| keep[a] && keep[b])
        .map(|&(a, b)| {
            let (u, v) = (&events[a], &events[b]);
            EventArc {
                from: new_id[u],
                to: new_id[v],
                i: u.loc,
                j: v.loc,
                cost: inst.cost(u.loc, v.loc),
                cap: cap(inst, u.loc, v.loc),
            }
        })
        .collect();
    arcs.sort_by_key(|a| (a.from, a.to));

    let mut net = EventNetwork {
        out: vec![Vec::new(); kept.len()],
        inc: vec![Vec::new(); kept.len()],
        source: 0,
        sink: kept.len() - 1,
        events: kept,
        arcs,
        by_loc_arc: BTreeMap::new(),
    };
    for (k, a) in net.arcs.iter().enumerate() {
        net.out[a.from].push(k);
        net.inc[a.to].push(k);
        net.by_loc_arc.entry((a.i, a.j)).or_default().push(k);
    }
    net
}

impl EventNetwork {
    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn find(&self, ev: &Event) -> Option<usize> {
        self.events.binary_search(ev).ok()
    }

    /// Maps a location route (depots included) to its event sequence.
    pub fn route_events(&self, inst: &Instance, route: &[Loc]) -> Option<Vec<usize>> {
        let mut onboard: Vec<Loc> = Vec::new();
        let mut out = Vec::with_capacity(route.len());
        for &loc in route {
            let ev = if inst.is_pickup(loc) {
                let e = Event::new(loc, onboard.clone());
                onboard.push(loc);
                e
            } else if inst.is_delivery(loc) {
                onboard.retain(|&k| k != inst.pickup_of(loc));
                Event::new(loc, onboard.clone())
            } else {
                Event::new(loc, Vec::new())
            };
            out.push(self.find(&ev)?);
        }
        Some(out)
    }

    /// Deterministic text listing.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "events {}", self.events.len());
        for (k, e) in self.events.iter().enumerate() {
            let _ = writeln!(s, "{k} loc={} onboard={:?}", e.loc, e.onboard);
        }
        let _ = writeln!(s, "arcs {}", self.arcs.len());
        for a in &self.arcs {
            let _ = writeln!(
                s,
                "{} -> {} ({}, {}) cost={:.4} cap={}",
                a.from, a.to, a.i, a.j, a.cost, a.cap
            );
        }
        s
    }
}
