//! Subtour and infeasible-path cuts over physical network elements.
//!
//! A cut names a set of physical elements (fragments, node arcs or event
//! arcs) that no feasible solution uses all at once. It is imposed over all
//! time copies of those elements.

use std::collections::{BTreeMap, BTreeSet};

use super::flow::Decomposition;
use super::ts::{element_locations, path_moves};
use crate::events::EventNetwork;
use crate::fragments::FragmentSet;
use crate::instance::{Instance, Loc};
use crate::schedule::{schedule_path, schedule_routes, StartRule};
use crate::timespace::{Element, TimeSpaceNetwork};

pub type CutSet = BTreeSet<Element>;

/// Right-hand side of the cut for `elems`: one less than the element count.
/// For `c` fragments joined by `c − 1` node arcs this is `2c − 2`.
pub fn cut_rhs(elems: &CutSet) -> usize {
    let frags = elems
        .iter()
        .filter(|e| matches!(e, Element::Fragment(_)))
        .count();
    let arcs = elems.len() - frags;
    let rhs = elems.len().saturating_sub(1);
    if frags > 0 && arcs + 1 == frags {
        debug_assert_eq!(rhs, 2 * frags - 2);
        log::debug!("cut over {frags} fragments and {arcs} node arcs, rhs 2c-2 = {rhs}");
    } else {
        log::debug!(
            "cut over {} elements ({frags} fragments), rhs {rhs}",
            elems.len()
        );
    }
    rhs
}

/// Element sets of the residual cycles of a decomposition.
pub fn subtour_cuts(net: &TimeSpaceNetwork, dec: &Decomposition) -> Vec<CutSet> {
    let mut out: Vec<CutSet> = Vec::new();
    for cycle in &dec.cycles {
        let elems: CutSet = path_moves(net, cycle)
            .into_iter()
            .filter_map(|k| net.edges[k].element())
            .collect();
        if !elems.is_empty() && !out.contains(&elems) {
            out.push(elems);
        }
    }
    out
}

/// One vehicle path as elements and the locations each element appends.
fn route_pieces(
    net: &TimeSpaceNetwork,
    frags: Option<&FragmentSet>,
    events: Option<&EventNetwork>,
    path: &[usize],
) -> Vec<(Element, Vec<Loc>)> {
    path_moves(net, path)
        .into_iter()
        .map(|k| {
            let e = net.edges[k].element().unwrap();
            (e, element_locations(frags, events, e))
        })
        .collect()
}

/// Shortest contiguous run of elements whose locations admit no schedule,
/// preferring the earliest such run. Runs start right after a node arc so
/// that the first location is the run's own first stop.
fn minimal_infeasible_run(
    inst: &Instance,
    origin: Loc,
    pieces: &[(Element, Vec<Loc>)],
) -> Option<CutSet> {
    let m = pieces.len();
    for len in 1..=m {
        for a in 0..=m - len {
            let mut locs: Vec<Loc> = Vec::new();
            // the run's first element contributes its head locations only, so
            // prepend the location reached before it
            if a == 0 {
                locs.push(origin);
            } else if let Some(last) = pieces[a - 1].1.last() {
                locs.push(*last);
            }
            for (_, l) in &pieces[a..a + len] {
                locs.extend(l);
            }
            if schedule_path(inst, &locs, StartRule::Free).is_none() {
                return Some(pieces[a..a + len].iter().map(|(e, _)| *e).collect());
            }
        }
    }
    None
}

/// Cuts for extracted vehicle paths that have no continuous schedule. A
/// path infeasible on its own yields its minimal infeasible run; paths that
/// are fine alone but clash through a shared large customer yield the union
/// of the elements of the clashing group.
pub fn infeasible_path_cuts(
    inst: &Instance,
    net: &TimeSpaceNetwork,
    frags: Option<&FragmentSet>,
    events: Option<&EventNetwork>,
    dec: &Decomposition,
) -> Vec<CutSet> {
    let mut out: Vec<CutSet> = Vec::new();
    let pieces: Vec<Vec<(Element, Vec<Loc>)>> = dec
        .paths
        .iter()
        .map(|p| route_pieces(net, frags, events, p))
        .collect();
    let locs: Vec<Vec<Loc>> = pieces
        .iter()
        .map(|ps| {
            std::iter::once(inst.origin())
                .chain(ps.iter().flat_map(|(_, l)| l.iter().copied()))
                .collect()
        })
        .collect();
    let mut alone_ok = vec![true; pieces.len()];
    for (v, ps) in pieces.iter().enumerate() {
        if schedule_path(inst, &locs[v], StartRule::Free).is_some() {
            continue;
        }
        alone_ok[v] = false;
        if let Some(cut) = minimal_infeasible_run(inst, inst.origin(), ps) {
            if !out.contains(&cut) {
                out.push(cut);
            }
        }
    }
    // groups of paths linked by large customers
    let mut group_of: BTreeMap<Loc, Vec<usize>> = BTreeMap::new();
    for (v, l) in locs.iter().enumerate() {
        for &loc in l {
            if inst.is_pickup(loc) && inst.is_large(loc) {
                group_of.entry(loc).or_default().push(v);
            }
        }
    }
    let mut parent: Vec<usize> = (0..locs.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for vs in group_of.values() {
        for w in vs.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..locs.len() {
        let r = find(&mut parent, v);
        comps.entry(r).or_default().push(v);
    }
    for vs in comps.values() {
        if vs.len() < 2 || vs.iter().any(|&v| !alone_ok[v]) {
            continue;
        }
        let routes: Vec<Vec<Loc>> = vs.iter().map(|&v| locs[v].clone()).collect();
        if schedule_routes(inst, &routes).is_none() {
            let cut: CutSet = vs
                .iter()
                .flat_map(|&v| pieces[v].iter().map(|(e, _)| *e))
                .collect();
            if !out.contains(&cut) {
                out.push(cut);
            }
        }
    }
    out
}
