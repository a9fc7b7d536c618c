//! Fragments: route pieces from a pickup to a delivery that carry load
//! everywhere strictly between their endpoints and admit a feasible schedule.

use std::fmt::Write;

use rayon::prelude::*;

use crate::instance::{Instance, Loc};
use crate::schedule::{schedule_path, StartRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FragmentKind {
    SmallChain,
    LargePair,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fragment {
    pub path: Vec<Loc>,
    pub cost: f64,
    pub kind: FragmentKind,
    /// Vehicles that traverse the fragment together.
    pub vehicles: usize,
}

impl Fragment {
    pub fn start(&self) -> Loc {
        self.path[0]
    }

    pub fn end(&self) -> Loc {
        *self.path.last().expect("non-empty fragment")
    }

    pub fn pickups<'a>(&'a self, inst: &'a Instance) -> impl Iterator<Item = Loc> + 'a {
        self.path.iter().copied().filter(|&l| inst.is_pickup(l))
    }
}

#[derive(Clone, Debug, Default)]
pub struct FragmentSet {
    pub fragments: Vec<Fragment>,
    /// Fragment ids containing each pickup, indexed by location.
    pub covering: Vec<Vec<usize>>,
}

impl FragmentSet {
    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "fragments {}", self.fragments.len());
        for (k, f) in self.fragments.iter().enumerate() {
            let kind = match f.kind {
                FragmentKind::SmallChain => "small",
                FragmentKind::LargePair => "large",
            };
            let _ = writeln!(
                s,
                "{k} {kind} vehicles={} cost={:.4} path={:?}",
                f.vehicles, f.cost, f.path
            );
        }
        s
    }
}

fn path_cost(inst: &Instance, path: &[Loc]) -> f64 {
    path.windows(2).map(|w| inst.cost(w[0], w[1])).sum()
}

/// DFS state: path so far, customers on board and current load.
fn extend(
    inst: &Instance,
    path: &mut Vec<Loc>,
    onboard: &mut Vec<Loc>,
    load: i64,
    out: &mut Vec<Vec<Loc>>,
) {
    let last = *path.last().unwrap();
    let n = inst.n;
    // deliveries of on-board customers
    for idx in 0..onboard.len() {
        let k = onboard[idx];
        let d = k + n;
        if !inst.arc_allowed(last, d) {
            continue;
        }
        path.push(d);
        if schedule_path(inst, path, StartRule::Free).is_some() {
            let q = load - inst.load(k);
            if q == 0 {
                out.push(path.clone());
            } else {
                let removed = onboard.remove(idx);
                extend(inst, path, onboard, q, out);
                onboard.insert(idx, removed);
            }
        }
        path.pop();
    }
    // further small pickups
    for j in inst.pickups() {
        if inst.is_large(j) || path.contains(&j) || !inst.arc_allowed(last, j) {
            continue;
        }
        if load + inst.load(j) > inst.capacity {
            continue;
        }
        path.push(j);
        if schedule_path(inst, path, StartRule::Free).is_some() {
            onboard.push(j);
            extend(inst, path, onboard, load + inst.load(j), out);
            onboard.pop();
        }
        path.pop();
    }
}

/// Small-chain fragments starting at `root`, unsorted.
fn from_root(inst: &Instance, root: Loc) -> Vec<Vec<Loc>> {
    let mut out = Vec::new();
    if inst.load(root) > inst.capacity || schedule_path(inst, &[root], StartRule::Free).is_none() {
        return out;
    }
    let mut path = vec![root];
    let mut onboard = vec![root];
    extend(inst, &mut path, &mut onboard, inst.load(root), &mut out);
    out
}

pub fn enumerate_fragments(inst: &Instance) -> FragmentSet {
    let roots: Vec<Loc> = inst.small_customers();
    let mut paths: Vec<Vec<Loc>> = roots
        .par_iter()
        .flat_map_iter(|&r| from_root(inst, r))
        .collect();
    for i in inst.large_customers() {
        let p = vec![i, i + inst.n];
        if schedule_path(inst, &p, StartRule::Free).is_some() {
            paths.push(p);
        }
    }
    paths.sort();
    let fragments: Vec<Fragment> = paths
        .into_iter()
        .map(|path| {
            let large = inst.is_large(path[0]);
            Fragment {
                cost: path_cost(inst, &path),
                kind: if large {
                    FragmentKind::LargePair
                } else {
                    FragmentKind::SmallChain
                },
                vehicles: if large {
                    inst.vehicles_needed(path[0])
                } else {
                    1
                },
                path,
            }
        })
        .collect();
    let mut covering = vec![Vec::new(); inst.num_locations()];
    for (k, f) in fragments.iter().enumerate() {
        for p in f.pickups(inst) {
            covering[p].push(k);
        }
    }
    FragmentSet {
        fragments,
        covering,
    }
}
