//! Event-based formulation in continuous time.

use crate::events::EventNetwork;
use crate::formulations::flow::{decompose, Decomposition, FlowArc};
use crate::instance::Instance;
use crate::milp::{Cmp, MilpModel, MilpSolution, VarId};

#[derive(Clone, Debug)]
pub struct EbfModel {
    pub model: MilpModel,
    /// Integer flow per event arc.
    pub x: Vec<VarId>,
    /// Usage indicator per event arc.
    pub y: Vec<VarId>,
    /// Service-start time per location.
    pub t: Vec<VarId>,
}

pub fn build_ebf(inst: &Instance, net: &EventNetwork) -> EbfModel {
    let mut model = MilpModel::new();
    let mut x = Vec::with_capacity(net.num_arcs());
    let mut y = Vec::with_capacity(net.num_arcs());
    for (k, a) in net.arcs.iter().enumerate() {
        let cap = a.cap.min(inst.fleet) as f64;
        let xv = model.integer(format!("x_{k}_{}_{}", a.i, a.j), 0.0, cap, a.cost);
        let yv = model.binary(format!("y_{k}_{}_{}", a.i, a.j), 0.0);
        model.constrain(
            format!("link_{k}"),
            vec![(xv, 1.0), (yv, -cap)],
            Cmp::Le,
            0.0,
        );
        model.constrain(
            format!("use_{k}"),
            vec![(yv, 1.0), (xv, -1.0)],
            Cmp::Le,
            0.0,
        );
        x.push(xv);
        y.push(yv);
    }
    let t: Vec<VarId> = (0..inst.num_locations())
        .map(|i| model.continuous(format!("t_{i}"), inst.early(i), inst.late(i), 0.0))
        .collect();

    for u in 0..net.num_events() {
        if u == net.source || u == net.sink {
            continue;
        }
        let mut terms: Vec<(VarId, f64)> = net.inc[u].iter().map(|&k| (x[k], 1.0)).collect();
        terms.extend(net.out[u].iter().map(|&k| (x[k], -1.0)));
        model.constrain(format!("flow_{u}"), terms, Cmp::Eq, 0.0);
    }
    for p in inst.pickups() {
        let terms: Vec<(VarId, f64)> = net
            .arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.i == p)
            .map(|(k, _)| (x[k], 1.0))
            .collect();
        model.constrain(
            format!("cover_{p}"),
            terms,
            Cmp::Eq,
            inst.vehicles_needed(p) as f64,
        );
    }
    let fleet: Vec<(VarId, f64)> = net.out[net.source].iter().map(|&k| (x[k], 1.0)).collect();
    model.constrain("fleet", fleet, Cmp::Le, inst.fleet as f64);

    // t_j >= t_i + T_ij - M_ij (1 - Σ y) per location arc
    for (&(i, j), ks) in &net.by_loc_arc {
        let big_m = inst.big_m(i, j);
        let mut terms = vec![(t[j], 1.0), (t[i], -1.0)];
        terms.extend(ks.iter().map(|&k| (y[k], -big_m)));
        model.constrain(
            format!("time_{i}_{j}"),
            terms,
            Cmp::Ge,
            inst.time(i, j) - big_m,
        );
    }
    for p in inst.pickups() {
        let d = inst.delivery_of(p);
        model.constrain(
            format!("ride_{p}"),
            vec![(t[d], 1.0), (t[p], -1.0)],
            Cmp::Le,
            inst.ride(p),
        );
    }
    EbfModel { model, x, y, t }
}

impl EbfModel {
    pub fn decompose(&self, net: &EventNetwork, sol: &MilpSolution) -> Decomposition {
        let arcs: Vec<FlowArc> = net
            .arcs
            .iter()
            .zip(&self.x)
            .map(|(a, &v)| FlowArc {
                from: a.from,
                to: a.to,
                units: sol.int(v).max(0) as usize,
            })
            .collect();
        decompose(net.num_events(), &arcs, net.source, net.sink)
    }
}
