//! Dynamic discretization discovery over the time-space formulations.
//!
//! Each iteration solves the formulation on a partial network whose arcs are
//! rounded down, decomposes the flow into vehicle paths and asks a selection
//! model whether the paths admit a continuous schedule. If they do (and the
//! joint schedule oracle, which also checks ride limits, agrees) the master
//! objective is optimal. Otherwise time points are added where arcs had to be
//! shortened and the loop repeats.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::events::EventNetwork;
use crate::formulations::cuts::CutSet;
use crate::formulations::ts::{path_locations, path_moves};
use crate::formulations::{
    build_tsef, build_tsfrag, report_from, solve_ts_with_cuts, SolveReport, TsModel,
};
use crate::fragments::FragmentSet;
use crate::instance::{Instance, Loc, EPS};
use crate::milp::{self, Cmp, MilpBackend, MilpModel, SolveOptions, Status, VarId};
use crate::schedule::{schedule_path, StartRule};
use crate::solution::{RouteSet, Stats};
use crate::timespace::{expand_events, expand_fragments, Element, TimeGrid, TimeSpaceNetwork};

/// One line of the iteration trace.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct DddRecord {
    pub iteration: usize,
    pub bound: f64,
    /// Selection-model objective; `None` when it had no solution.
    pub z: Option<usize>,
    pub new_points: usize,
    pub master_seconds: f64,
    pub cuts: usize,
}

impl DddRecord {
    pub fn trace_line(&self) -> String {
        let z = self.z.map_or("-".to_string(), |z| z.to_string());
        format!(
            "{}, {:.4}, {}, {}, {:.3}",
            self.iteration, self.bound, z, self.new_points, self.master_seconds
        )
    }
}

#[derive(Clone, Copy)]
enum Net<'a> {
    Fragments(&'a FragmentSet),
    Events(&'a EventNetwork),
}

impl<'a> Net<'a> {
    fn frags(self) -> Option<&'a FragmentSet> {
        match self {
            Net::Fragments(f) => Some(f),
            Net::Events(_) => None,
        }
    }

    fn events(self) -> Option<&'a EventNetwork> {
        match self {
            Net::Events(e) => Some(e),
            Net::Fragments(_) => None,
        }
    }

    fn expand(self, inst: &Instance, grid: &TimeGrid) -> TimeSpaceNetwork {
        match self {
            Net::Fragments(f) => expand_fragments(inst, f, grid),
            Net::Events(e) => expand_events(inst, e, grid),
        }
    }

    fn build(self, inst: &Instance, net: &TimeSpaceNetwork) -> TsModel {
        match self {
            Net::Fragments(f) => build_tsfrag(inst, f, net),
            Net::Events(e) => build_tsef(inst, e, net),
        }
    }

    /// Head location and tail location of a physical element.
    fn ends(self, e: Element) -> (Loc, Loc) {
        match e {
            Element::Fragment(f) => {
                let fr = &self.frags().unwrap().fragments[f];
                (fr.start(), fr.end())
            }
            Element::LocArc(i, j) => (i, j),
            Element::EventArc(a) => {
                let arc = &self.events().unwrap().arcs[a];
                (arc.i, arc.j)
            }
        }
    }

    fn stats(self) -> Stats {
        match self {
            Net::Fragments(f) => Stats {
                fragments: Some(f.len()),
                ..Stats::default()
            },
            Net::Events(e) => Stats {
                events: Some(e.num_events()),
                event_arcs: Some(e.num_arcs()),
                ..Stats::default()
            },
        }
    }
}

/// Where a location arc of a vehicle path comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArcSource {
    /// Inside a fragment.
    Fragment(usize),
    /// A node arc or event arc.
    Move(Element),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionArc {
    pub i: Loc,
    pub j: Loc,
    /// Shortened length available in the time-space solution.
    pub shortened: f64,
    pub source: ArcSource,
}

#[derive(Clone, Debug, Default)]
pub struct SelectionInput {
    pub arcs: Vec<SelectionArc>,
    /// Fragment start, end and shortened length.
    pub fragments: Vec<(Loc, Loc, f64)>,
    pub locations: Vec<Loc>,
}

#[derive(Clone, Debug)]
pub struct SelectionResult {
    /// `None` when the selection model is infeasible.
    pub z: Option<usize>,
    /// Arcs that must stay shorter than their travel time.
    pub flagged: Vec<SelectionArc>,
    /// Departure time per location, when solved.
    pub tau: BTreeMap<Loc, f64>,
}

/// Location arcs of the used paths with their shortened lengths. A fragment
/// copy passes its whole rounding discrepancy to each of its arcs; node and
/// event arcs keep their time-space length. Arcs shared by several vehicles
/// appear once with the smallest length.
pub fn selection_input(
    inst: &Instance,
    net: &TimeSpaceNetwork,
    frags: Option<&FragmentSet>,
    paths: &[Vec<usize>],
) -> SelectionInput {
    let mut arcs: BTreeMap<(Loc, Loc), SelectionArc> = BTreeMap::new();
    let mut fragments: BTreeMap<usize, (Loc, Loc, f64)> = BTreeMap::new();
    let mut locations: Vec<Loc> = Vec::new();
    let mut push = |i: Loc, j: Loc, shortened: f64, source: ArcSource| {
        arcs.entry((i, j))
            .and_modify(|a| {
                if shortened < a.shortened {
                    a.shortened = shortened;
                    a.source = source;
                }
            })
            .or_insert(SelectionArc {
                i,
                j,
                shortened,
                source,
            });
    };
    for path in paths {
        let mut at = inst.origin();
        locations.push(at);
        for k in path_moves(net, path) {
            let edge = &net.edges[k];
            let el = edge.element().unwrap();
            match el {
                Element::Fragment(f) => {
                    let fr = &frags.expect("fragment set").fragments[f];
                    let disc = edge.discrepancy();
                    for w in fr.path.windows(2) {
                        push(
                            w[0],
                            w[1],
                            inst.time(w[0], w[1]) - disc,
                            ArcSource::Fragment(f),
                        );
                    }
                    fragments.insert(k, (fr.start(), fr.end(), edge.length()));
                    locations.extend(&fr.path[1..]);
                    at = fr.end();
                }
                Element::LocArc(..) | Element::EventArc(_) => {
                    let j = net.nodes[edge.to].loc;
                    let len = if j == inst.sink() {
                        inst.time(at, j)
                    } else {
                        edge.length()
                    };
                    push(at, j, len, ArcSource::Move(el));
                    locations.push(j);
                    at = j;
                }
            }
        }
    }
    locations.sort_unstable();
    locations.dedup();
    SelectionInput {
        arcs: arcs.into_values().collect(),
        fragments: fragments.into_values().collect(),
        locations,
    }
}

/// Minimizes the number of arcs allowed below their travel time, with one
/// departure time per location.
pub fn selection_model(
    inst: &Instance,
    input: &SelectionInput,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<SelectionResult> {
    let mut m = MilpModel::new();
    let tau: BTreeMap<Loc, VarId> = input
        .locations
        .iter()
        .map(|&i| {
            (
                i,
                m.continuous(format!("tau_{i}"), inst.early(i), inst.late(i), 0.0),
            )
        })
        .collect();
    let mut deltas = Vec::with_capacity(input.arcs.len());
    for a in &input.arcs {
        let (i, j) = (a.i, a.j);
        let t = inst.time(i, j);
        let theta = m.continuous(
            format!("theta_{i}_{j}"),
            a.shortened.max(0.0),
            f64::INFINITY,
            0.0,
        );
        let delta = m.binary(format!("delta_{i}_{j}"), 1.0);
        m.constrain(
            format!("short_{i}_{j}"),
            vec![(theta, 1.0), (delta, t)],
            Cmp::Ge,
            t,
        );
        m.constrain(
            format!("inc_{i}_{j}"),
            vec![(tau[&j], 1.0), (tau[&i], -1.0), (theta, -1.0)],
            Cmp::Ge,
            0.0,
        );
        deltas.push(delta);
    }
    for (k, &(s, e, len)) in input.fragments.iter().enumerate() {
        m.constrain(
            format!("frag_{k}"),
            vec![(tau[&e], 1.0), (tau[&s], -1.0)],
            Cmp::Ge,
            len,
        );
    }
    let sol = milp::solve(&m, backend, opts)?;
    if !sol.status.has_solution() {
        return Ok(SelectionResult {
            z: None,
            flagged: Vec::new(),
            tau: BTreeMap::new(),
        });
    }
    let flagged: Vec<SelectionArc> = input
        .arcs
        .iter()
        .zip(&deltas)
        .filter(|(a, &d)| sol.int(d) == 1 && a.shortened < inst.time(a.i, a.j) - EPS)
        .map(|(a, _)| a.clone())
        .collect();
    Ok(SelectionResult {
        z: Some(sol.objective.round() as usize),
        flagged,
        tau: tau.iter().map(|(&i, &v)| (i, sol.value(v))).collect(),
    })
}

/// Inserts the actual arrival of each flagged arc for every departure time
/// at its tail. For an arc inside a fragment, the fragment's earliest end
/// from each start time is inserted at the fragment's end. Returns the
/// number of new points.
pub fn refine_grid(
    inst: &Instance,
    grid: &mut TimeGrid,
    frags: Option<&FragmentSet>,
    flagged: &[SelectionArc],
) -> usize {
    let mut added = 0;
    for a in flagged {
        match a.source {
            ArcSource::Fragment(f) => {
                let fr = &frags.expect("fragment set").fragments[f];
                let starts = grid.at(fr.start()).to_vec();
                for t in starts {
                    let Some(s) = schedule_path(inst, &fr.path, StartRule::NotBefore(t)) else {
                        break;
                    };
                    added += grid.insert(inst, fr.end(), s.end()) as usize;
                }
            }
            ArcSource::Move(_) => {
                if a.j == inst.sink() {
                    continue;
                }
                let tails: Vec<f64> = if a.i == inst.origin() {
                    vec![inst.early(a.i)]
                } else {
                    grid.at(a.i).to_vec()
                };
                for t in tails {
                    let arrive = (t + inst.time(a.i, a.j)).max(inst.early(a.j));
                    added += grid.insert(inst, a.j, arrive) as usize;
                }
            }
        }
    }
    added
}

/// Inserts the exact arrival of every used copy that was rounded down.
fn refine_used(
    inst: &Instance,
    grid: &mut TimeGrid,
    net: &TimeSpaceNetwork,
    kind: Net,
    paths: &[Vec<usize>],
) -> usize {
    let mut added = 0;
    for path in paths {
        for k in path_moves(net, path) {
            let e = &net.edges[k];
            if e.discrepancy() > EPS {
                let (_, head) = kind.ends(e.element().unwrap());
                added += grid.insert(inst, head, e.exact) as usize;
            }
        }
    }
    added
}

pub fn solve_tsfrag(
    inst: &Instance,
    frags: &FragmentSet,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    run(
        inst,
        Net::Fragments(frags),
        TimeGrid::initial(inst),
        backend,
        opts,
    )
}

pub fn solve_tsef(
    inst: &Instance,
    events: &EventNetwork,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    run(
        inst,
        Net::Events(events),
        TimeGrid::initial(inst),
        backend,
        opts,
    )
}

/// TSFrag with DDD from a given starting grid.
pub fn solve_tsfrag_from(
    inst: &Instance,
    frags: &FragmentSet,
    grid: TimeGrid,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    run(inst, Net::Fragments(frags), grid, backend, opts)
}

/// TSEF with DDD from a given starting grid.
pub fn solve_tsef_from(
    inst: &Instance,
    events: &EventNetwork,
    grid: TimeGrid,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    run(inst, Net::Events(events), grid, backend, opts)
}

fn run(
    inst: &Instance,
    kind: Net,
    mut grid: TimeGrid,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let start = Instant::now();
    let approximate = matches!(kind, Net::Events(_));
    let mut persistent: Vec<CutSet> = Vec::new();
    let mut history: Vec<DddRecord> = Vec::new();
    let mut best_bound = f64::NEG_INFINITY;
    let mut stats = kind.stats();
    for k in 1.. {
        let remaining = opts.time_limit - start.elapsed().as_secs_f64();
        let net = kind.expand(inst, &grid);
        let mut m = kind.build(inst, &net);
        for c in &persistent {
            m.add_cut(c);
        }
        let master_start = Instant::now();
        let sub = opts.clone().with_time_limit(remaining.max(0.01));
        let (sol, dec, added) = solve_ts_with_cuts(
            inst,
            &net,
            kind.frags(),
            kind.events(),
            &mut m,
            false,
            backend,
            &sub,
        )?;
        let master_seconds = master_start.elapsed().as_secs_f64();
        stats.cuts += added.len();
        stats.iterations = k;
        persistent.extend(added);
        let finish = |mut r: SolveReport, history: Vec<DddRecord>| {
            r.history = history;
            r
        };
        let paths: Vec<Vec<Loc>> = dec
            .paths
            .iter()
            .map(|p| path_locations(inst, &net, kind.frags(), kind.events(), p))
            .collect();
        match sol.status {
            Status::Infeasible => {
                history.push(DddRecord {
                    iteration: k,
                    bound: f64::INFINITY,
                    z: None,
                    new_points: 0,
                    master_seconds,
                    cuts: stats.cuts,
                });
                log::info!(target: "darpsv::ddd", "{}", history.last().unwrap().trace_line());
                let r = report_from(
                    String::new(),
                    &sol,
                    RouteSet::default(),
                    false,
                    stats,
                    approximate,
                );
                return Ok(finish(r, history));
            }
            Status::TimeLimit | Status::FeasibleWithGap => {
                // out of time inside the master: keep its bound
                let mut r = match (sol.status, RouteSet::schedule(inst, &paths)) {
                    (Status::FeasibleWithGap, Some(rs)) => {
                        report_from(String::new(), &sol, rs, true, stats, approximate)
                    }
                    _ => {
                        let mut s = sol.clone();
                        s.status = Status::TimeLimit;
                        report_from(
                            String::new(),
                            &s,
                            RouteSet::default(),
                            false,
                            stats,
                            approximate,
                        )
                    }
                };
                r.bound = r.bound.max(best_bound);
                return Ok(finish(r, history));
            }
            Status::Optimal => {}
        }
        let bound = sol.objective;
        if bound < best_bound - 1e-6 * best_bound.abs().max(1.0) {
            log::warn!("DDD bound decreased: {best_bound} -> {bound}");
        }
        best_bound = best_bound.max(bound);

        let input = selection_input(inst, &net, kind.frags(), &dec.paths);
        let sel = selection_model(inst, &input, backend, &SolveOptions::default())?;
        let mut new_points = 0;
        if sel.z == Some(0) {
            if let Some(rs) = RouteSet::schedule(inst, &paths) {
                history.push(DddRecord {
                    iteration: k,
                    bound,
                    z: Some(0),
                    new_points: 0,
                    master_seconds,
                    cuts: stats.cuts,
                });
                log::info!(target: "darpsv::ddd", "{}", history.last().unwrap().trace_line());
                let r = report_from(String::new(), &sol, rs, true, stats, approximate);
                return Ok(finish(r, history));
            }
        } else if sel.z.is_some() {
            new_points = refine_grid(inst, &mut grid, kind.frags(), &sel.flagged);
        }
        if new_points == 0 {
            new_points = refine_used(inst, &mut grid, &net, kind, &dec.paths);
        }
        history.push(DddRecord {
            iteration: k,
            bound,
            z: sel.z,
            new_points,
            master_seconds,
            cuts: stats.cuts,
        });
        log::info!(target: "darpsv::ddd", "{}", history.last().unwrap().trace_line());
        if new_points == 0 {
            return Err(Error::Stall {
                iteration: k,
                flagged: sel.flagged.len(),
            });
        }
        if start.elapsed().as_secs_f64() >= opts.time_limit {
            let mut s = sol.clone();
            s.status = Status::TimeLimit;
            s.best_bound = best_bound;
            let r = report_from(
                String::new(),
                &s,
                RouteSet::default(),
                false,
                stats,
                approximate,
            );
            return Ok(finish(r, history));
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{ride_rounding, subtour_rounding};
    use crate::formulations::{solve, Formulation, SolveConfig};
    use crate::gen::{random_instance, RandomParams};
    use crate::validate::brute_optimum;

    fn assert_monotone(history: &[DddRecord]) {
        for w in history.windows(2) {
            assert!(w[1].bound >= w[0].bound - 1e-6, "{:?}", history);
        }
        assert_eq!(history.last().unwrap().z, Some(0));
    }

    #[test]
    fn bounds_rise_and_end_with_zero_shortening() {
        let params = RandomParams {
            n: 4,
            fleet: 3,
            ..RandomParams::default()
        };
        let mut solved = 0;
        for seed in 0..12 {
            let inst = random_instance(seed, &params);
            let rep = solve(&inst, &SolveConfig::new(Formulation::Tsfrag).with_ddd()).unwrap();
            if rep.status != Status::Optimal {
                continue;
            }
            solved += 1;
            assert_monotone(&rep.history);
            assert_eq!(rep.stats.iterations, rep.history.len());
            let (obj, _) = brute_optimum(&inst).unwrap().unwrap();
            assert!((rep.objective - obj).abs() < 1e-4);
        }
        assert!(solved > 5);
    }

    #[test]
    fn event_variant_is_labelled_approximate() {
        let inst = ride_rounding();
        let rep = solve(&inst, &SolveConfig::new(Formulation::Tsef).with_ddd()).unwrap();
        assert!(rep.approximate);
        let exact = solve(&inst, &SolveConfig::new(Formulation::Tsfrag).with_ddd()).unwrap();
        assert!(!exact.approximate);
        assert_eq!(exact.status, Status::Optimal);
        // rounding the departure at p2 down stretches its ride past the limit
        assert_eq!(rep.status, Status::Infeasible);
    }

    #[test]
    fn refinement_adds_points() {
        let inst = subtour_rounding();
        let frags = crate::fragments::enumerate_fragments(&inst);
        let mut grid = TimeGrid::initial(&inst);
        let before = grid.total_points();
        let f = frags
            .fragments
            .iter()
            .position(|f| f.path == vec![1, 2, 3, 4])
            .unwrap();
        let arc = SelectionArc {
            i: 1,
            j: 4,
            shortened: 0.0,
            source: ArcSource::Fragment(f),
        };
        let added = refine_grid(&inst, &mut grid, Some(&frags), &[arc]);
        assert!(added > 0);
        assert_eq!(grid.total_points(), before + added);
        assert!(grid.at(4).contains(&608.0));
    }
}
