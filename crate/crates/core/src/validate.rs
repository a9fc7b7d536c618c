//! Independent feasibility checks and an exhaustive optimum for tiny instances.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, Loc, EPS};
use crate::schedule::{schedule_path, schedule_routes, StartRule};
use crate::solution::{RouteSet, SolutionFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ViolationKind {
    Pairing,
    Precedence,
    Capacity,
    Window,
    RideTime,
    Increment,
    SyncTime,
    SyncCount,
    EmptyBeforeLarge,
    ImmediateDelivery,
    FleetSize,
    CostMismatch,
    /// A small customer served zero or several times, or a stop repeated.
    Coverage,
    /// A route that does not run from the origin to the destination depot.
    Depot,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub route: Option<usize>,
    pub location: Option<Loc>,
    /// Amount by which the constraint is violated, where meaningful.
    pub amount: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(r) = self.route {
            write!(f, " route={r}")?;
        }
        if let Some(l) = self.location {
            write!(f, " loc={l}")?;
        }
        write!(f, " by {:.6}", self.amount)
    }
}

fn v(kind: ViolationKind, route: Option<usize>, location: Option<Loc>, amount: f64) -> Violation {
    Violation {
        kind,
        route,
        location,
        amount,
    }
}

/// Load change one vehicle sees at `i`.
fn vehicle_load(inst: &Instance, i: Loc) -> i64 {
    let q = inst.load(i);
    if inst.is_large(i) {
        q.signum() * inst.capacity
    } else {
        q
    }
}

/// All violations of `rs`; empty exactly when it is a feasible solution.
pub fn check(inst: &Instance, rs: &RouteSet) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    let (origin, sink) = (inst.origin(), inst.sink());
    let mut served: BTreeMap<Loc, Vec<(usize, f64)>> = BTreeMap::new();
    let mut used = 0;
    for (r, route) in rs.routes.iter().enumerate() {
        let stops = &route.stops;
        if stops.len() <= 2 && stops.iter().all(|s| inst.is_depot(s.loc)) {
            continue;
        }
        used += 1;
        if stops.first().map(|s| s.loc) != Some(origin) {
            out.push(v(Depot, Some(r), stops.first().map(|s| s.loc), 0.0));
        }
        if stops.last().map(|s| s.loc) != Some(sink) {
            out.push(v(Depot, Some(r), stops.last().map(|s| s.loc), 0.0));
        }
        let mut pos: BTreeMap<Loc, usize> = BTreeMap::new();
        let mut load: i64 = 0;
        for (k, s) in stops.iter().enumerate() {
            let i = s.loc;
            if i >= inst.num_locations() {
                out.push(v(Coverage, Some(r), Some(i), 0.0));
                return out;
            }
            if inst.is_depot(i) && k != 0 && k + 1 != stops.len() {
                out.push(v(Depot, Some(r), Some(i), 0.0));
            }
            if !inst.is_depot(i) && pos.insert(i, k).is_some() {
                out.push(v(Coverage, Some(r), Some(i), 0.0));
            }
            if s.t < inst.early(i) - EPS || s.t > inst.late(i) + EPS {
                let amount = (inst.early(i) - s.t).max(s.t - inst.late(i));
                out.push(v(Window, Some(r), Some(i), amount));
            }
            if k > 0 {
                let prev = &stops[k - 1];
                let need = prev.t + inst.time(prev.loc, i);
                if s.t < need - EPS {
                    out.push(v(Increment, Some(r), Some(i), need - s.t));
                }
            }
            if inst.is_pickup(i) && inst.is_large(i) {
                if load != 0 {
                    out.push(v(EmptyBeforeLarge, Some(r), Some(i), load as f64));
                }
                if stops.get(k + 1).map(|n| n.loc) != Some(inst.delivery_of(i)) {
                    out.push(v(ImmediateDelivery, Some(r), Some(i), 0.0));
                }
            }
            load += vehicle_load(inst, i);
            if load > inst.capacity || load < 0 {
                out.push(v(
                    Capacity,
                    Some(r),
                    Some(i),
                    (load - inst.capacity).max(-load) as f64,
                ));
            }
            if inst.is_pickup(i) {
                served.entry(i).or_default().push((r, s.t));
            }
            if inst.is_delivery(i) {
                served.entry(i).or_default().push((r, s.t));
            }
        }
        for (&i, &k) in &pos {
            if inst.is_pickup(i) {
                let d = inst.delivery_of(i);
                match pos.get(&d) {
                    None => out.push(v(Pairing, Some(r), Some(i), 0.0)),
                    Some(&kd) if kd < k => out.push(v(Precedence, Some(r), Some(i), 0.0)),
                    Some(&kd) => {
                        let ride = stops[kd].t - stops[k].t;
                        if ride > inst.ride(i) + EPS {
                            out.push(v(RideTime, Some(r), Some(i), ride - inst.ride(i)));
                        }
                    }
                }
            } else if inst.is_delivery(i) && !pos.contains_key(&inst.pickup_of(i)) {
                out.push(v(Pairing, Some(r), Some(i), 0.0));
            }
        }
    }
    if used > inst.fleet {
        out.push(v(FleetSize, None, None, (used - inst.fleet) as f64));
    }
    for p in inst.pickups() {
        let visits = served.get(&p).map_or(0, Vec::len);
        let need = inst.vehicles_needed(p);
        if inst.is_large(p) {
            if visits != need {
                out.push(v(SyncCount, None, Some(p), visits as f64 - need as f64));
            }
            for loc in [p, inst.delivery_of(p)] {
                if let Some(vs) = served.get(&loc) {
                    let lo = vs.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
                    let hi = vs.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
                    if hi - lo > EPS {
                        out.push(v(SyncTime, None, Some(loc), hi - lo));
                    }
                }
            }
        } else if visits != 1 {
            out.push(v(Coverage, None, Some(p), visits as f64 - 1.0));
        }
    }
    out.sort_by_key(|a| (a.kind, a.route, a.location));
    out
}

/// `check` plus agreement of the reported objective with the route costs.
pub fn check_solution(inst: &Instance, file: &SolutionFile) -> Vec<Violation> {
    let rs = file.route_set();
    let mut out = check(inst, &rs);
    if let Some(obj) = file.objective {
        let cost = rs.cost(inst);
        let tol = EPS * obj.abs().max(1.0);
        if (obj - cost).abs() > tol {
            out.push(v(ViolationKind::CostMismatch, None, None, obj - cost));
        }
    }
    out
}

/// Orders of one vehicle's customers that respect precedence, capacity and
/// the large-customer rules, each feasible on its own, with their cost.
fn vehicle_orders(inst: &Instance, customers: &[Loc]) -> Vec<(f64, Vec<Loc>)> {
    let mut out = Vec::new();
    let mut path = vec![inst.origin()];
    fn rec(
        inst: &Instance,
        customers: &[Loc],
        path: &mut Vec<Loc>,
        onboard: &mut Vec<Loc>,
        out: &mut Vec<(f64, Vec<Loc>)>,
    ) {
        let done = customers.iter().all(|&p| path.contains(&p)) && onboard.is_empty();
        if done {
            path.push(inst.sink());
            if schedule_path(inst, path, StartRule::Free).is_some() {
                let cost = path.windows(2).map(|w| inst.cost(w[0], w[1])).sum();
                out.push((cost, path.clone()));
            }
            path.pop();
            return;
        }
        let load: i64 = onboard.iter().map(|&k| vehicle_load(inst, k)).sum();
        for &p in customers {
            if path.contains(&p) {
                continue;
            }
            if inst.is_large(p) {
                if !onboard.is_empty() {
                    continue;
                }
                path.extend([p, inst.delivery_of(p)]);
                if schedule_path(inst, path, StartRule::Free).is_some() {
                    rec(inst, customers, path, onboard, out);
                }
                path.truncate(path.len() - 2);
            } else {
                if load + inst.load(p) > inst.capacity {
                    continue;
                }
                path.push(p);
                onboard.push(p);
                if schedule_path(inst, path, StartRule::Free).is_some() {
                    rec(inst, customers, path, onboard, out);
                }
                onboard.pop();
                path.pop();
            }
        }
        for idx in 0..onboard.len() {
            let p = onboard.remove(idx);
            path.push(inst.delivery_of(p));
            if schedule_path(inst, path, StartRule::Free).is_some() {
                rec(inst, customers, path, onboard, out);
            }
            path.pop();
            onboard.insert(idx, p);
        }
    }
    if customers.is_empty() {
        return vec![(0.0, Vec::new())];
    }
    let mut onboard = Vec::new();
    rec(inst, customers, &mut path, &mut onboard, &mut out);
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Minimum-cost feasible solution by exhaustive enumeration. `None` when
/// the instance has no feasible solution.
pub fn brute_optimum(inst: &Instance) -> Result<Option<(f64, RouteSet)>> {
    if inst.n > 4 || inst.fleet > 3 {
        return Err(Error::TooLarge(format!(
            "exhaustive search is limited to n <= 4 and |V| <= 3 (got n = {}, |V| = {})",
            inst.n, inst.fleet
        )));
    }
    let fleet = inst.fleet;
    // per customer: the vehicle subsets that may serve it
    let choices: Vec<Vec<Vec<usize>>> = inst
        .pickups()
        .map(|p| subsets(fleet, inst.vehicles_needed(p)))
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let has_large = !inst.large_customers().is_empty();
    let mut best: Option<(f64, Vec<Vec<Loc>>)> = None;
    let mut cache: BTreeMap<Vec<Loc>, Vec<(f64, Vec<Loc>)>> = BTreeMap::new();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let mut per_vehicle: Vec<Vec<Loc>> = vec![Vec::new(); fleet];
        for (c, &k) in pick.iter().enumerate() {
            for &veh in &choices[c][k] {
                per_vehicle[veh].push(c + 1);
            }
        }
        let orders: Vec<Vec<(f64, Vec<Loc>)>> = per_vehicle
            .iter()
            .map(|cs| {
                cache
                    .entry(cs.clone())
                    .or_insert_with(|| vehicle_orders(inst, cs))
                    .clone()
            })
            .collect();
        if orders.iter().all(|o| !o.is_empty()) {
            let mut idx = vec![0usize; fleet];
            'combos: loop {
                let cost: f64 = (0..fleet).map(|veh| orders[veh][idx[veh]].0).sum();
                let better = best.as_ref().is_none_or(|(b, _)| cost < *b - 1e-9);
                if better {
                    let routes: Vec<Vec<Loc>> = (0..fleet)
                        .map(|veh| orders[veh][idx[veh]].1.clone())
                        .filter(|r| !r.is_empty())
                        .collect();
                    if !has_large || schedule_routes(inst, &routes).is_some() {
                        best = Some((cost, routes));
                    }
                }
                // odometer over the sorted order lists
                let mut d = 0;
                loop {
                    if d == fleet {
                        break 'combos;
                    }
                    idx[d] += 1;
                    if idx[d] < orders[d].len() {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
            }
        }
        let mut c = 0;
        loop {
            if c == pick.len() {
                let out = best.map(|(cost, routes)| {
                    let rs = RouteSet::schedule(inst, &routes).expect("oracle-feasible routes");
                    (cost, rs)
                });
                return Ok(out);
            }
            pick[c] += 1;
            if pick[c] < choices[c].len() {
                break;
            }
            pick[c] = 0;
            c += 1;
        }
    }
}

/// All `k`-subsets of `0..n`, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Location;
    use crate::solution::Stop;

    fn inst_with(loads: &[i64], cap: i64, fleet: usize) -> Instance {
        let n = loads.len();
        let dim = 2 * n + 2;
        let locs = (0..dim)
            .map(|k| {
                let load = if k == 0 || k == dim - 1 {
                    0
                } else if k <= n {
                    loads[k - 1]
                } else {
                    -loads[k - n - 1]
                };
                Location {
                    id: k,
                    x: if k == 0 || k == dim - 1 {
                        0.0
                    } else {
                        k as f64
                    },
                    y: 0.0,
                    service: 0.0,
                    load,
                    early: 0.0,
                    late: 1000.0,
                }
            })
            .collect();
        Instance::from_locations("t", n, cap, fleet, locs, vec![100.0; n]).unwrap()
    }

    #[test]
    fn forced_single_route() {
        let inst = inst_with(&[1], 1, 1);
        let (cost, rs) = brute_optimum(&inst).unwrap().unwrap();
        assert_eq!(rs.paths(), vec![vec![0, 1, 2, 3]]);
        assert!((cost - (1.0 + 1.0 + 2.0)).abs() < 1e-9);
        assert!(check(&inst, &rs).is_empty());
    }

    #[test]
    fn large_customer_doubles_cost() {
        let inst = inst_with(&[4], 2, 2);
        let (cost, rs) = brute_optimum(&inst).unwrap().unwrap();
        assert_eq!(rs.routes.len(), 2);
        assert!((cost - 2.0 * 4.0).abs() < 1e-9);
        assert_eq!(rs.sync_groups[0].vehicles, vec![0, 1]);
        assert!(check(&inst, &rs).is_empty());
        let one = inst_with(&[4], 2, 1);
        assert!(brute_optimum(&one).unwrap().is_none());
    }

    #[test]
    fn injected_faults() {
        let inst = inst_with(&[4, 1], 2, 3);
        let (_, rs) = brute_optimum(&inst).unwrap().unwrap();
        assert!(check(&inst, &rs).is_empty());

        let mut late = rs.clone();
        let r = late
            .routes
            .iter()
            .position(|r| r.stops.iter().any(|s| s.loc == 1))
            .unwrap();
        let k = late.routes[r]
            .stops
            .iter()
            .position(|s| s.loc == 1)
            .unwrap();
        late.routes[r].stops[k].t += 1.0;
        let kinds: Vec<_> = check(&inst, &late).into_iter().map(|x| x.kind).collect();
        assert!(kinds.contains(&ViolationKind::SyncTime), "{kinds:?}");
        assert_eq!(
            kinds
                .iter()
                .filter(|&&k| k == ViolationKind::SyncTime)
                .count(),
            1
        );

        let mut dropped = rs.clone();
        let r = dropped
            .routes
            .iter()
            .position(|r| r.stops.iter().any(|s| s.loc == 1))
            .unwrap();
        dropped.routes.remove(r);
        let kinds: Vec<_> = check(&inst, &dropped).into_iter().map(|x| x.kind).collect();
        assert!(kinds.contains(&ViolationKind::SyncCount));
    }

    #[test]
    fn route_order_does_not_matter() {
        let inst = inst_with(&[1, 1, 2], 2, 2);
        let rs = RouteSet::new(
            &inst,
            &[vec![0, 1, 2, 4, 5, 7], vec![0, 3, 6, 7]],
            &[
                vec![0.0, 1.0, 2.0, 4.0, 5.0, 12.0],
                vec![0.0, 1.0, 4.0, 10.0],
            ],
        );
        let mut swapped = rs.clone();
        swapped.routes.reverse();
        let a: Vec<_> = check(&inst, &rs)
            .into_iter()
            .map(|x| (x.kind, x.location))
            .collect();
        let b: Vec<_> = check(&inst, &swapped)
            .into_iter()
            .map(|x| (x.kind, x.location))
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn detects_local_faults() {
        let inst = inst_with(&[2, 2], 2, 1);
        // both customers on board at once exceeds capacity 2
        let stops = |locs: &[Loc]| {
            let mut t = 0.0;
            let mut prev = 0;
            locs.iter()
                .map(|&l| {
                    t += inst.time(prev, l);
                    prev = l;
                    Stop { loc: l, t }
                })
                .collect::<Vec<_>>()
        };
        let rs = RouteSet {
            routes: vec![crate::solution::Route {
                vehicle: 0,
                stops: stops(&[0, 1, 2, 3, 4, 5]),
            }],
            sync_groups: vec![],
        };
        let kinds: Vec<_> = check(&inst, &rs).into_iter().map(|x| x.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::Capacity]);
        let rs = RouteSet {
            routes: vec![crate::solution::Route {
                vehicle: 0,
                stops: stops(&[0, 3, 1, 2, 4, 5]),
            }],
            sync_groups: vec![],
        };
        let kinds: Vec<_> = check(&inst, &rs).into_iter().map(|x| x.kind).collect();
        assert!(kinds.contains(&ViolationKind::Precedence));
    }

    #[test]
    fn size_guard() {
        let inst = inst_with(&[1, 1, 1, 1, 1], 2, 1);
        assert!(matches!(brute_optimum(&inst), Err(Error::TooLarge(_))));
    }
}
