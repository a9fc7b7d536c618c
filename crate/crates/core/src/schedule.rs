//! Schedule feasibility as a system of difference constraints.
//!
//! Every constraint has the form `x_j >= x_i + w`. The earliest solution (the
//! componentwise least one with the reference variable pinned at zero) is the
//! longest-path distance from the reference; a positive cycle means the system
//! is infeasible.

use crate::instance::{Instance, Loc, EPS};

/// Difference-constraint system over `vars` variables. Variable 0 is the
/// reference point fixed at time zero.
#[derive(Clone, Debug, Default)]
pub struct DiffSystem {
    vars: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl DiffSystem {
    pub const REF: usize = 0;

    pub fn new() -> Self {
        DiffSystem {
            vars: 1,
            edges: Vec::new(),
        }
    }

    pub fn add_var(&mut self) -> usize {
        self.vars += 1;
        self.vars - 1
    }

    pub fn num_vars(&self) -> usize {
        self.vars
    }

    /// `x_to >= x_from + w`
    pub fn at_least(&mut self, from: usize, to: usize, w: f64) {
        self.edges.push((from, to, w));
    }

    /// `lo <= x <= hi`
    pub fn window(&mut self, x: usize, lo: f64, hi: f64) {
        self.at_least(Self::REF, x, lo);
        self.at_least(x, Self::REF, -hi);
    }

    /// `x_b - x_a <= w`
    pub fn at_most_after(&mut self, a: usize, b: usize, w: f64) {
        self.at_least(b, a, -w);
    }

    /// `x_a == x_b`
    pub fn equal(&mut self, a: usize, b: usize) {
        self.at_least(a, b, 0.0);
        self.at_least(b, a, 0.0);
    }

    /// Earliest feasible assignment, or `None` when a positive cycle exists.
    pub fn earliest(&self) -> Option<Vec<f64>> {
        let mut dist = vec![f64::NEG_INFINITY; self.vars];
        dist[Self::REF] = 0.0;
        for _ in 0..self.vars {
            let mut changed = false;
            for &(u, v, w) in &self.edges {
                if dist[u] == f64::NEG_INFINITY {
                    continue;
                }
                let cand = dist[u] + w;
                if cand > dist[v] + EPS * 1e-3 {
                    dist[v] = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // one more sweep detects a remaining positive cycle
        for &(u, v, w) in &self.edges {
            if dist[u] != f64::NEG_INFINITY && dist[u] + w > dist[v] + EPS {
                return None;
            }
        }
        if dist[Self::REF] > EPS {
            return None;
        }
        // unconstrained variables default to the reference
        for d in dist.iter_mut() {
            if *d == f64::NEG_INFINITY {
                *d = 0.0;
            }
        }
        Some(dist)
    }
}

/// How the first node of a path may be timed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StartRule {
    /// Any time within the first node's window.
    Free,
    /// Exactly at the given time.
    Fixed(f64),
    /// At the given time or later.
    NotBefore(f64),
}

/// A feasible timing of a path: `times[k]` is when service starts at `path[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub times: Vec<f64>,
}

impl Schedule {
    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("non-empty schedule")
    }
}

/// Earliest schedule of `path` under windows, travel-time increments and the
/// ride limits of every customer whose pickup and delivery both lie on the
/// path. Returns `None` when no schedule exists.
pub fn schedule_path(inst: &Instance, path: &[Loc], start: StartRule) -> Option<Schedule> {
    if path.is_empty() {
        return None;
    }
    let mut sys = DiffSystem::new();
    let xs: Vec<usize> = path.iter().map(|_| sys.add_var()).collect();
    for (k, &loc) in path.iter().enumerate() {
        sys.window(xs[k], inst.early(loc), inst.late(loc));
        if k > 0 {
            sys.at_least(xs[k - 1], xs[k], inst.time(path[k - 1], loc));
        }
    }
    for (a, &p) in path.iter().enumerate() {
        if !inst.is_pickup(p) {
            continue;
        }
        let d = inst.delivery_of(p);
        if let Some(b) = path.iter().skip(a + 1).position(|&x| x == d) {
            sys.at_most_after(xs[a], xs[a + 1 + b], inst.ride(p));
        }
    }
    match start {
        StartRule::Free => {}
        StartRule::Fixed(t) => {
            sys.window(xs[0], t, t);
        }
        StartRule::NotBefore(t) => {
            sys.at_least(DiffSystem::REF, xs[0], t);
        }
    }
    let sol = sys.earliest()?;
    Some(Schedule {
        times: xs.iter().map(|&x| sol[x]).collect(),
    })
}

/// Feasibility with an optional fixed start time.
pub fn feasible_schedule(
    inst: &Instance,
    path: &[Loc],
    fixed_start: Option<f64>,
) -> Option<Schedule> {
    let rule = match fixed_start {
        Some(t) => StartRule::Fixed(t),
        None => StartRule::Free,
    };
    schedule_path(inst, path, rule)
}

/// Forward pass with windows and increments only, ignoring ride limits.
/// Returns the earliest time at the last node.
pub fn relaxed_forward(inst: &Instance, path: &[Loc]) -> Option<f64> {
    let (&first, rest) = path.split_first()?;
    let mut t = inst.early(first);
    let mut prev = first;
    for &loc in rest {
        t = (t + inst.time(prev, loc)).max(inst.early(loc));
        if t > inst.late(loc) + EPS {
            return None;
        }
        prev = loc;
    }
    Some(t)
}

/// Joint earliest schedule of several routes (depots included). Every
/// customer location gets one time variable shared by all routes visiting
/// it, which synchronizes vehicles serving the same large customer; depot
/// times are per route. Ride limits apply to every customer served.
pub fn schedule_routes(inst: &Instance, routes: &[Vec<Loc>]) -> Option<Vec<Vec<f64>>> {
    let mut sys = DiffSystem::new();
    let mut shared: Vec<Option<usize>> = vec![None; inst.num_locations()];
    let mut vars: Vec<Vec<usize>> = Vec::with_capacity(routes.len());
    for route in routes {
        let mut xs = Vec::with_capacity(route.len());
        for (k, &loc) in route.iter().enumerate() {
            let x = if inst.is_depot(loc) {
                let x = sys.add_var();
                sys.window(x, inst.early(loc), inst.late(loc));
                x
            } else {
                *shared[loc].get_or_insert_with(|| {
                    let x = sys.add_var();
                    sys.window(x, inst.early(loc), inst.late(loc));
                    x
                })
            };
            if k > 0 {
                sys.at_least(xs[k - 1], x, inst.time(route[k - 1], loc));
            }
            xs.push(x);
        }
        vars.push(xs);
    }
    for p in inst.pickups() {
        if let (Some(a), Some(b)) = (shared[p], shared[inst.delivery_of(p)]) {
            sys.at_most_after(a, b, inst.ride(p));
        }
    }
    let sol = sys.earliest()?;
    Some(
        vars.iter()
            .map(|xs| xs.iter().map(|&x| sol[x]).collect())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Instance, Location, Matrix};

    /// Instance with explicit travel times; `cost = time`.
    pub(crate) fn matrix_instance(
        n: usize,
        windows: &[(f64, f64)],
        times: &[(Loc, Loc, f64)],
        ride: f64,
    ) -> Instance {
        let dim = 2 * n + 2;
        let mut tt = Matrix::from_fn(dim, |i, j| if i == j { 0.0 } else { 1000.0 });
        for &(i, j, t) in times {
            tt.set(i, j, t);
        }
        let locations = (0..dim)
            .map(|k| Location {
                id: k,
                x: 0.0,
                y: 0.0,
                service: 0.0,
                load: if k == 0 || k == dim - 1 {
                    0
                } else if k <= n {
                    1
                } else {
                    -1
                },
                early: windows[k].0,
                late: windows[k].1,
            })
            .collect();
        Instance {
            name: "matrix".into(),
            n,
            capacity: 3,
            fleet: 1,
            route_duration: None,
            locations,
            ride_limit: vec![ride; n],
            travel_cost: tt.clone(),
            travel_time: tt,
        }
    }

    #[test]
    fn single_arc_chain() {
        let inst = matrix_instance(
            1,
            &[(0.0, 100.0), (0.0, 10.0), (5.0, 20.0), (0.0, 100.0)],
            &[(1, 2, 5.0)],
            5.0,
        );
        let s = feasible_schedule(&inst, &[1, 2], Some(0.0)).unwrap();
        assert_eq!(s.end(), 5.0);
        assert_eq!(s.times, vec![0.0, 5.0]);
    }

    #[test]
    fn ride_limit_forces_waiting_at_pickup() {
        // p1 -> p2 -> d1 -> d2, both rides capped at 26 minutes
        let inst = matrix_instance(
            2,
            &[
                (0.0, 1000.0),
                (600.0, 600.0),
                (620.0, 640.0),
                (620.0, 630.0),
                (650.0, 650.0),
                (0.0, 1000.0),
            ],
            &[(1, 2, 24.0), (2, 3, 2.0), (3, 4, 24.0)],
            26.0,
        );
        let s = feasible_schedule(&inst, &[1, 2, 3, 4], None).unwrap();
        assert_eq!(s.times, vec![600.0, 624.0, 626.0, 650.0]);
    }

    #[test]
    fn infeasible_window() {
        let inst = matrix_instance(
            1,
            &[(0.0, 100.0), (0.0, 10.0), (0.0, 12.0), (0.0, 100.0)],
            &[(1, 2, 15.0)],
            50.0,
        );
        assert!(feasible_schedule(&inst, &[1, 2], None).is_none());
        assert!(relaxed_forward(&inst, &[1, 2]).is_none());
    }

    #[test]
    fn shared_times_synchronize_routes() {
        // two routes through the same pickup; the second arrives later
        let inst = matrix_instance(
            1,
            &[(0.0, 100.0), (0.0, 50.0), (0.0, 100.0), (0.0, 100.0)],
            &[(0, 1, 5.0), (1, 2, 5.0), (2, 3, 1.0)],
            50.0,
        );
        let mut slow = inst.clone();
        slow.travel_time.set(0, 1, 20.0);
        let r = vec![0, 1, 2, 3];
        let times = schedule_routes(&slow, &[r.clone(), r.clone()]).unwrap();
        assert_eq!(times[0][1], 20.0);
        assert_eq!(times[1][1], 20.0);
        assert_eq!(times[0][2], 25.0);
        let mut tight = slow.clone();
        tight.locations[1].late = 10.0;
        assert!(schedule_routes(&tight, &[r.clone(), r]).is_none());
    }

    #[test]
    fn not_before_can_wait() {
        let inst = matrix_instance(
            1,
            &[(0.0, 100.0), (0.0, 50.0), (40.0, 60.0), (0.0, 100.0)],
            &[(1, 2, 5.0)],
            10.0,
        );
        // Fixed at 0 the ride would be 40 > 10.
        assert!(feasible_schedule(&inst, &[1, 2], Some(0.0)).is_none());
        let s = schedule_path(&inst, &[1, 2], StartRule::NotBefore(0.0)).unwrap();
        assert_eq!(s.times, vec![30.0, 40.0]);
    }
}
