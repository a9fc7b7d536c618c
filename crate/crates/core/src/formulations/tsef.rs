//! Time-space event formulation.

use std::collections::BTreeMap;

use super::ts::TsModel;
use crate::events::EventNetwork;
use crate::instance::{Instance, Loc};
use crate::milp::{Cmp, VarId};
use crate::timespace::{EdgeKind, Element, TimeSpaceNetwork};

/// Integer flow `χ ≤ U γ` and binary `γ ≤ χ` per event-arc copy, idle flow
/// per idle arc. Pickups get their vehicle count, the fleet bounds the
/// origin outflow, and ride limits compare the arrival stamp at the delivery
/// with the departure stamp at the pickup. All vehicles of a large customer
/// leave its pickup on one copy.
pub fn build_tsef(inst: &Instance, events: &EventNetwork, net: &TimeSpaceNetwork) -> TsModel {
    let mut m = TsModel::new(net);
    for (k, e) in net.edges.iter().enumerate() {
        match e.kind {
            EdgeKind::Move(Element::EventArc(a)) => {
                let cap = e.vehicles.min(inst.fleet) as f64;
                let chi = m.model.integer(format!("chi_{k}_e{a}"), 0.0, cap, e.cost);
                let gamma = m.model.binary(format!("gamma_{k}_e{a}"), 0.0);
                m.model.constrain(
                    format!("lo_{k}"),
                    vec![(gamma, 1.0), (chi, -1.0)],
                    Cmp::Le,
                    0.0,
                );
                m.model.constrain(
                    format!("hi_{k}"),
                    vec![(chi, 1.0), (gamma, -cap)],
                    Cmp::Le,
                    0.0,
                );
                m.flow_var.push(chi);
                m.use_var.push(Some(gamma));
            }
            EdgeKind::Move(other) => unreachable!("event network edge {other:?}"),
            EdgeKind::Idle => {
                let z = m
                    .model
                    .integer(format!("I_{k}"), 0.0, inst.fleet as f64, 0.0);
                m.flow_var.push(z);
                m.use_var.push(None);
            }
        }
        m.mult.push(1);
    }
    m.add_conservation(net);

    // move copies leaving each pickup and entering each delivery
    let mut leaving: BTreeMap<Loc, Vec<usize>> = BTreeMap::new();
    let mut entering: BTreeMap<Loc, Vec<usize>> = BTreeMap::new();
    for (k, e) in net.moves() {
        let Some(Element::EventArc(a)) = e.element() else {
            continue;
        };
        let arc = &events.arcs[a];
        if inst.is_pickup(arc.i) {
            leaving.entry(arc.i).or_default().push(k);
        }
        if inst.is_delivery(arc.j) {
            entering.entry(arc.j).or_default().push(k);
        }
    }
    for p in inst.pickups() {
        let out = leaving.get(&p).map(Vec::as_slice).unwrap_or(&[]);
        let terms: Vec<(VarId, f64)> = out.iter().map(|&k| (m.flow_var[k], 1.0)).collect();
        m.model.constrain(
            format!("cover_{p}"),
            terms,
            Cmp::Eq,
            inst.vehicles_needed(p) as f64,
        );
        if inst.is_large(p) {
            let terms: Vec<(VarId, f64)> =
                out.iter().map(|&k| (m.use_var[k].unwrap(), 1.0)).collect();
            m.model.constrain(format!("sync_{p}"), terms, Cmp::Eq, 1.0);
        }
        let into = entering
            .get(&inst.delivery_of(p))
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        let mut terms: Vec<(VarId, f64)> = into
            .iter()
            .map(|&k| (m.use_var[k].unwrap(), net.edges[k].arrive))
            .collect();
        terms.extend(
            out.iter()
                .map(|&k| (m.use_var[k].unwrap(), -net.edges[k].depart)),
        );
        m.model
            .constrain(format!("ride_{p}"), terms, Cmp::Le, inst.ride(p));
    }
    let fleet: Vec<(VarId, f64)> = net.out[net.source]
        .iter()
        .map(|&k| (m.flow_var[k], 1.0))
        .collect();
    m.model
        .constrain("fleet", fleet, Cmp::Le, inst.fleet as f64);
    // copies between two large customers may split the vehicles
    m.add_indicators(net, |e, cap| {
        let Element::EventArc(a) = e else {
            return false;
        };
        let arc = &events.arcs[a];
        cap > 1 && inst.is_delivery(arc.i) && inst.is_pickup(arc.j)
    });
    m
}
