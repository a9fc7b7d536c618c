//! Time-space fragment formulation.

use super::ts::{element_name, TsModel};
use crate::fragments::FragmentSet;
use crate::instance::Instance;
use crate::milp::{Cmp, VarId};
use crate::timespace::{EdgeKind, Element, TimeSpaceNetwork};

/// Binary `X` per fragment copy (weighted by its vehicle count in the flow
/// balance), integer `Y ≤ α` per node-arc copy, integer idle flow. Each
/// pickup lies on exactly one chosen fragment copy; at most `|V|` vehicles
/// leave the origin.
pub fn build_tsfrag(inst: &Instance, frags: &FragmentSet, net: &TimeSpaceNetwork) -> TsModel {
    let mut m = TsModel::new(net);
    for (k, e) in net.edges.iter().enumerate() {
        let (var, mult, used) = match e.kind {
            EdgeKind::Move(Element::Fragment(f)) => {
                let fr = &frags.fragments[f];
                let x = m
                    .model
                    .binary(format!("X_{k}_f{f}"), fr.cost * fr.vehicles as f64);
                (x, fr.vehicles, Some(x))
            }
            EdgeKind::Move(el) => {
                let cap = e.vehicles.min(inst.fleet);
                let y = m.model.integer(
                    format!("Y_{k}_{}", element_name(el)),
                    0.0,
                    cap as f64,
                    e.cost,
                );
                (y, 1, (cap <= 1).then_some(y))
            }
            EdgeKind::Idle => {
                let z = m
                    .model
                    .integer(format!("I_{k}"), 0.0, inst.fleet as f64, 0.0);
                (z, 1, None)
            }
        };
        m.flow_var.push(var);
        m.mult.push(mult);
        m.use_var.push(used);
    }
    m.add_conservation(net);
    for p in inst.pickups() {
        let terms: Vec<(VarId, f64)> = frags.covering[p]
            .iter()
            .filter_map(|&f| m.copies.get(&Element::Fragment(f)))
            .flatten()
            .map(|&k| (m.flow_var[k], 1.0))
            .collect();
        m.model.constrain(format!("cover_{p}"), terms, Cmp::Eq, 1.0);
    }
    let fleet: Vec<(VarId, f64)> = net.out[net.source]
        .iter()
        .map(|&k| (m.flow_var[k], 1.0))
        .collect();
    m.model
        .constrain("fleet", fleet, Cmp::Le, inst.fleet as f64);
    m.add_indicators(net, |e, cap| matches!(e, Element::LocArc(..)) && cap > 1);
    m
}
