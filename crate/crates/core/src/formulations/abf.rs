//! Arc-based formulation with one copy of the location graph per vehicle.

use std::collections::BTreeMap;

use crate::instance::{Instance, Loc};
use crate::milp::{Cmp, MilpModel, MilpSolution, VarId};

#[derive(Clone, Debug)]
pub struct AbfModel {
    pub model: MilpModel,
    /// Arc variables per vehicle, keyed by location arc.
    pub f: Vec<BTreeMap<(Loc, Loc), VarId>>,
    /// Service-start time per vehicle and location.
    pub t: Vec<Vec<VarId>>,
    /// Shared time at each large-customer location.
    pub tt: BTreeMap<Loc, VarId>,
    /// Load after service per vehicle and location.
    pub load: Vec<Vec<VarId>>,
}

/// Load change seen by one vehicle: a large customer fills it completely.
fn vehicle_load(inst: &Instance, i: Loc) -> i64 {
    let q = inst.load(i);
    if inst.is_large(i) {
        q.signum() * inst.capacity
    } else {
        q
    }
}

pub fn build_abf(inst: &Instance) -> AbfModel {
    let mut model = MilpModel::new();
    let nl = inst.num_locations();
    let (origin, sink) = (inst.origin(), inst.sink());
    let cap = inst.capacity;
    let closure = inst.time_closure();
    let arcs: Vec<(Loc, Loc)> = (0..nl)
        .flat_map(|i| (0..nl).map(move |j| (i, j)))
        .filter(|&(i, j)| inst.arc_time_feasible(i, j))
        .collect();

    let mut f = Vec::with_capacity(inst.fleet);
    let mut t = Vec::with_capacity(inst.fleet);
    let mut load = Vec::with_capacity(inst.fleet);
    for v in 0..inst.fleet {
        let mut fv = BTreeMap::new();
        for &(i, j) in &arcs {
            // an idle vehicle goes straight to the destination at no cost
            let cost = if i == origin && j == sink {
                0.0
            } else {
                inst.cost(i, j)
            };
            fv.insert((i, j), model.binary(format!("f_{i}_{j}_{v}"), cost));
        }
        f.push(fv);
        t.push(
            (0..nl)
                .map(|i| model.continuous(format!("t_{i}_{v}"), inst.early(i), inst.late(i), 0.0))
                .collect::<Vec<_>>(),
        );
        load.push(
            (0..nl)
                .map(|i| {
                    let vq = vehicle_load(inst, i);
                    model.integer(
                        format!("Q_{i}_{v}"),
                        vq.max(0) as f64,
                        cap.min(cap + vq) as f64,
                        0.0,
                    )
                })
                .collect::<Vec<_>>(),
        );
    }
    let mut tt = BTreeMap::new();
    for p in inst.large_customers() {
        for i in [p, inst.delivery_of(p)] {
            tt.insert(
                i,
                model.continuous(format!("tt_{i}"), inst.early(i), inst.late(i), 0.0),
            );
        }
    }

    let out_of = |fv: &BTreeMap<(Loc, Loc), VarId>, i: Loc| -> Vec<(VarId, f64)> {
        fv.range((i, 0)..=(i, usize::MAX))
            .map(|(_, &x)| (x, 1.0))
            .collect()
    };
    let into = |fv: &BTreeMap<(Loc, Loc), VarId>, j: Loc| -> Vec<(VarId, f64)> {
        fv.iter()
            .filter(|((_, b), _)| *b == j)
            .map(|(_, &x)| (x, 1.0))
            .collect()
    };

    for p in inst.pickups() {
        let terms: Vec<(VarId, f64)> = f.iter().flat_map(|fv| out_of(fv, p)).collect();
        model.constrain(
            format!("cover_{p}"),
            terms,
            Cmp::Eq,
            inst.vehicles_needed(p) as f64,
        );
    }
    for (v, fv) in f.iter().enumerate() {
        for p in inst.pickups() {
            let mut terms = out_of(fv, p);
            terms.extend(
                out_of(fv, inst.delivery_of(p))
                    .into_iter()
                    .map(|(x, c)| (x, -c)),
            );
            model.constrain(format!("pair_{p}_{v}"), terms, Cmp::Eq, 0.0);
        }
        model.constrain(format!("leave_{v}"), out_of(fv, origin), Cmp::Eq, 1.0);
        model.constrain(format!("return_{v}"), into(fv, sink), Cmp::Eq, 1.0);
        for i in 1..sink {
            let mut terms = into(fv, i);
            terms.extend(out_of(fv, i).into_iter().map(|(x, c)| (x, -c)));
            model.constrain(format!("flow_{i}_{v}"), terms, Cmp::Eq, 0.0);
        }
        for (&i, &shared) in &tt {
            model.constrain(
                format!("sync_{i}_{v}"),
                vec![(t[v][i], 1.0), (shared, -1.0)],
                Cmp::Eq,
                0.0,
            );
        }
        for (&(i, j), &x) in fv {
            let big_m = inst.big_m(i, j);
            model.constrain(
                format!("time_{i}_{j}_{v}"),
                vec![(t[v][j], 1.0), (t[v][i], -1.0), (x, -big_m)],
                Cmp::Ge,
                inst.time(i, j) - big_m,
            );
            let vq_j = vehicle_load(inst, j) as f64;
            let w = cap.min(cap + vehicle_load(inst, i)) as f64;
            model.constrain(
                format!("load_{i}_{j}_{v}"),
                vec![(load[v][j], 1.0), (load[v][i], -1.0), (x, -w)],
                Cmp::Ge,
                vq_j - w,
            );
        }
        for p in inst.pickups() {
            let d = inst.delivery_of(p);
            model.constrain(
                format!("ride_{p}_{v}"),
                vec![(t[v][d], 1.0), (t[v][p], -1.0)],
                Cmp::Le,
                inst.ride(p),
            );
            model.constrain(
                format!("prec_{p}_{v}"),
                vec![(t[v][d], 1.0), (t[v][p], -1.0)],
                Cmp::Ge,
                closure.get(p, d),
            );
        }
    }
    // identical vehicles: use them in index order
    if f.iter().all(|fv| fv.contains_key(&(origin, sink))) {
        for v in 1..inst.fleet {
            model.constrain(
                format!("order_{v}"),
                vec![
                    (f[v][&(origin, sink)], 1.0),
                    (f[v - 1][&(origin, sink)], -1.0),
                ],
                Cmp::Ge,
                0.0,
            );
        }
    }
    AbfModel {
        model,
        f,
        t,
        tt,
        load,
    }
}

impl AbfModel {
    /// Location sequences of the vehicles that leave the origin for a customer.
    pub fn routes(&self, inst: &Instance, sol: &MilpSolution) -> Vec<Vec<Loc>> {
        let (origin, sink) = (inst.origin(), inst.sink());
        let mut routes = Vec::new();
        for fv in &self.f {
            let mut route = vec![origin];
            let mut at = origin;
            while at != sink && route.len() <= inst.num_locations() {
                let next = fv
                    .range((at, 0)..=(at, usize::MAX))
                    .find(|(_, &x)| sol.int(x) == 1)
                    .map(|(&(_, j), _)| j);
                match next {
                    Some(j) => {
                        route.push(j);
                        at = j;
                    }
                    None => break,
                }
            }
            if route.len() > 2 {
                routes.push(route);
            }
        }
        routes
    }
}
