//! Model state shared by the two time-space formulations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::flow::{decompose, Decomposition, FlowArc};
use crate::events::EventNetwork;
use crate::fragments::FragmentSet;
use crate::instance::{Instance, Loc};
use crate::milp::{Cmp, Constraint, MilpModel, MilpSolution, VarId};
use crate::timespace::{EdgeKind, Element, TimeSpaceNetwork};

/// A time-space MILP together with its map back to the network.
#[derive(Clone, Debug)]
pub struct TsModel {
    pub model: MilpModel,
    /// Flow variable of each edge (χ, X, Y or idle flow).
    pub flow_var: Vec<VarId>,
    /// Vehicles moved per unit of the flow variable.
    pub mult: Vec<usize>,
    /// Binary usage variable of each move edge (γ, X, or Y when capped at 1).
    pub use_var: Vec<Option<VarId>>,
    /// Usage indicators for elements whose copies may carry several vehicles.
    pub indicator: HashMap<Element, VarId>,
    /// Edge ids of the copies of each element.
    pub copies: BTreeMap<Element, Vec<usize>>,
}

impl TsModel {
    pub(crate) fn new(net: &TimeSpaceNetwork) -> Self {
        let mut copies: BTreeMap<Element, Vec<usize>> = BTreeMap::new();
        for (k, e) in net.moves() {
            copies.entry(e.element().unwrap()).or_default().push(k);
        }
        TsModel {
            model: MilpModel::new(),
            flow_var: Vec::with_capacity(net.num_edges()),
            mult: Vec::with_capacity(net.num_edges()),
            use_var: Vec::with_capacity(net.num_edges()),
            indicator: HashMap::new(),
            copies,
        }
    }

    /// Conservation at every node except the depots.
    pub(crate) fn add_conservation(&mut self, net: &TimeSpaceNetwork) {
        for v in 0..net.num_nodes() {
            if v == net.source || v == net.sink {
                continue;
            }
            let mut terms: Vec<(VarId, f64)> = Vec::new();
            for &k in &net.inc[v] {
                terms.push((self.flow_var[k], self.mult[k] as f64));
            }
            for &k in &net.out[v] {
                terms.push((self.flow_var[k], -(self.mult[k] as f64)));
            }
            if !terms.is_empty() {
                self.model
                    .constrain(format!("flow_{v}"), terms, Cmp::Eq, 0.0);
            }
        }
    }

    /// Adds a binary `u_e` with `Σ copies ≤ cap · u_e` for every element
    /// whose copies may together carry more than one vehicle.
    pub(crate) fn add_indicators(
        &mut self,
        net: &TimeSpaceNetwork,
        needs: impl Fn(Element, usize) -> bool,
    ) {
        let elems: Vec<(Element, Vec<usize>)> =
            self.copies.iter().map(|(e, ks)| (*e, ks.clone())).collect();
        for (e, ks) in elems {
            let cap = ks.iter().map(|&k| net.edges[k].vehicles).max().unwrap_or(1);
            if !needs(e, cap) {
                continue;
            }
            let name = format!("u_{}", element_name(e));
            let u = self.model.binary(name.clone(), 0.0);
            let mut terms: Vec<(VarId, f64)> = ks
                .iter()
                .map(|&k| (self.flow_var[k], self.mult[k] as f64))
                .collect();
            terms.push((u, -(cap as f64)));
            self.model
                .constrain(format!("link_{name}"), terms, Cmp::Le, 0.0);
            self.indicator.insert(e, u);
        }
    }

    pub fn flows(&self, net: &TimeSpaceNetwork, sol: &MilpSolution) -> Vec<FlowArc> {
        net.edges
            .iter()
            .enumerate()
            .map(|(k, e)| FlowArc {
                from: e.from,
                to: e.to,
                units: sol.int(self.flow_var[k]).max(0) as usize * self.mult[k],
            })
            .collect()
    }

    pub fn decompose(&self, net: &TimeSpaceNetwork, sol: &MilpSolution) -> Decomposition {
        decompose(net.num_nodes(), &self.flows(net, sol), net.source, net.sink)
    }

    /// `Σ_{e ∈ elems} Σ_{copies of e} use ≤ |elems| − 1`, with indicators
    /// standing in for multi-vehicle elements.
    pub fn element_cut(&self, name: String, elems: &BTreeSet<Element>) -> Constraint {
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for e in elems {
            if let Some(&u) = self.indicator.get(e) {
                terms.push((u, 1.0));
            } else if let Some(ks) = self.copies.get(e) {
                terms.extend(ks.iter().filter_map(|&k| self.use_var[k]).map(|v| (v, 1.0)));
            }
        }
        Constraint::new(name, terms, Cmp::Le, elems.len() as f64 - 1.0)
    }

    pub fn add_cut(&mut self, elems: &BTreeSet<Element>) {
        let name = format!("cut_{}", self.model.num_constraints());
        let c = self.element_cut(name, elems);
        self.model.add_constraint(c);
    }
}

pub(crate) fn element_name(e: Element) -> String {
    match e {
        Element::Fragment(f) => format!("f{f}"),
        Element::LocArc(i, j) => format!("a{i}_{j}"),
        Element::EventArc(a) => format!("e{a}"),
    }
}

/// Locations appended to a route when it traverses `e`.
pub fn element_locations(
    frags: Option<&FragmentSet>,
    events: Option<&EventNetwork>,
    e: Element,
) -> Vec<Loc> {
    match e {
        Element::Fragment(f) => frags.expect("fragment set").fragments[f].path[1..].to_vec(),
        Element::LocArc(_, j) => vec![j],
        Element::EventArc(a) => vec![events.expect("event network").arcs[a].j],
    }
}

/// Move edges of a unit path, idle edges dropped.
pub fn path_moves(net: &TimeSpaceNetwork, path: &[usize]) -> Vec<usize> {
    path.iter()
        .copied()
        .filter(|&k| net.edges[k].kind != EdgeKind::Idle)
        .collect()
}

/// Location sequence of a unit path, from the origin to the destination depot.
pub fn path_locations(
    inst: &Instance,
    net: &TimeSpaceNetwork,
    frags: Option<&FragmentSet>,
    events: Option<&EventNetwork>,
    path: &[usize],
) -> Vec<Loc> {
    let mut locs = vec![inst.origin()];
    for k in path_moves(net, path) {
        locs.extend(element_locations(
            frags,
            events,
            net.edges[k].element().unwrap(),
        ));
    }
    locs
}
