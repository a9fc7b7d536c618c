//! Route sets and the solution file format.

use serde::{Deserialize, Serialize};

use crate::instance::{Instance, Loc, EPS};
use crate::milp::Status;
use crate::schedule::schedule_routes;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub loc: Loc,
    /// Service-start time.
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub vehicle: usize,
    pub stops: Vec<Stop>,
}

impl Route {
    pub fn locations(&self) -> Vec<Loc> {
        self.stops.iter().map(|s| s.loc).collect()
    }

    pub fn cost(&self, inst: &Instance) -> f64 {
        self.stops
            .windows(2)
            .map(|w| inst.cost(w[0].loc, w[1].loc))
            .sum()
    }
}

/// Vehicles serving one large customer together.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncGroup {
    pub customer: Loc,
    pub vehicles: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RouteSet {
    pub routes: Vec<Route>,
    pub sync_groups: Vec<SyncGroup>,
}

impl RouteSet {
    /// Builds a route set from location sequences and per-stop times.
    pub fn new(inst: &Instance, paths: &[Vec<Loc>], times: &[Vec<f64>]) -> Self {
        let routes: Vec<Route> = paths
            .iter()
            .zip(times)
            .enumerate()
            .map(|(v, (p, ts))| Route {
                vehicle: v,
                stops: p.iter().zip(ts).map(|(&loc, &t)| Stop { loc, t }).collect(),
            })
            .collect();
        let sync_groups = sync_groups(inst, &routes);
        RouteSet {
            routes,
            sync_groups,
        }
    }

    /// Schedules `paths` jointly with the earliest feasible times. `None`
    /// when no continuous schedule exists.
    pub fn schedule(inst: &Instance, paths: &[Vec<Loc>]) -> Option<Self> {
        let times = schedule_routes(inst, paths)?;
        Some(RouteSet::new(inst, paths, &times))
    }

    /// Earliest times ignoring ride limits and synchronization, for route
    /// sets that have no continuous schedule. Times may exceed windows.
    pub fn unscheduled(inst: &Instance, paths: &[Vec<Loc>]) -> Self {
        let times: Vec<Vec<f64>> = paths
            .iter()
            .map(|p| {
                let mut ts: Vec<f64> = Vec::with_capacity(p.len());
                for (k, &loc) in p.iter().enumerate() {
                    let t = if k == 0 {
                        inst.early(loc)
                    } else {
                        (ts[k - 1] + inst.time(p[k - 1], loc)).max(inst.early(loc))
                    };
                    ts.push(t);
                }
                ts
            })
            .collect();
        RouteSet::new(inst, paths, &times)
    }

    pub fn cost(&self, inst: &Instance) -> f64 {
        self.routes.iter().map(|r| r.cost(inst)).sum()
    }

    pub fn paths(&self) -> Vec<Vec<Loc>> {
        self.routes.iter().map(Route::locations).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }
}

/// Groups of vehicles visiting each large pickup.
pub fn sync_groups(inst: &Instance, routes: &[Route]) -> Vec<SyncGroup> {
    inst.large_customers()
        .into_iter()
        .filter_map(|p| {
            let vehicles: Vec<usize> = routes
                .iter()
                .filter(|r| r.stops.iter().any(|s| s.loc == p))
                .map(|r| r.vehicle)
                .collect();
            (!vehicles.is_empty()).then_some(SyncGroup {
                customer: p,
                vehicles,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    #[serde(rename = "|V_E|", default)]
    pub events: Option<usize>,
    #[serde(rename = "|A_E|", default)]
    pub event_arcs: Option<usize>,
    #[serde(rename = "|F|", default)]
    pub fragments: Option<usize>,
    pub cuts: usize,
    pub iterations: usize,
    #[serde(default)]
    pub seconds: f64,
}

/// On-disk solution: the document written by `solve --out`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub status: Status,
    pub routes: Vec<Route>,
    pub sync_groups: Vec<SyncGroup>,
    pub stats: Stats,
    #[serde(default)]
    pub method: String,
    /// Set when the objective refers to a discretized problem rather than
    /// the continuous-time one.
    #[serde(default)]
    pub approximate: bool,
}

impl SolutionFile {
    pub fn route_set(&self) -> RouteSet {
        RouteSet {
            routes: self.routes.clone(),
            sync_groups: self.sync_groups.clone(),
        }
    }

    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub(crate) fn opt_finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Whether two objective values agree within `tol`.
pub fn same_objective(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol.max(EPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Instance, Location};

    fn two_customers() -> Instance {
        let locs = vec![
            Location {
                id: 0,
                x: 0.0,
                y: 0.0,
                service: 0.0,
                load: 0,
                early: 0.0,
                late: 200.0,
            },
            Location {
                id: 1,
                x: 3.0,
                y: 4.0,
                service: 0.0,
                load: 1,
                early: 0.0,
                late: 100.0,
            },
            Location {
                id: 2,
                x: 6.0,
                y: 8.0,
                service: 0.0,
                load: 4,
                early: 0.0,
                late: 100.0,
            },
            Location {
                id: 3,
                x: 3.0,
                y: 0.0,
                service: 0.0,
                load: -1,
                early: 0.0,
                late: 100.0,
            },
            Location {
                id: 4,
                x: 6.0,
                y: 0.0,
                service: 0.0,
                load: -4,
                early: 0.0,
                late: 100.0,
            },
            Location {
                id: 5,
                x: 0.0,
                y: 0.0,
                service: 0.0,
                load: 0,
                early: 0.0,
                late: 200.0,
            },
        ];
        Instance::from_locations("two", 2, 2, 3, locs, vec![50.0, 50.0]).unwrap()
    }

    #[test]
    fn schedules_and_groups() {
        let inst = two_customers();
        let paths = vec![vec![0, 2, 4, 5], vec![0, 1, 3, 5], vec![0, 2, 4, 5]];
        let rs = RouteSet::schedule(&inst, &paths).unwrap();
        assert_eq!(
            rs.sync_groups,
            vec![SyncGroup {
                customer: 2,
                vehicles: vec![0, 2]
            }]
        );
        assert_eq!(rs.routes[0].stops[1].t, 10.0);
        let cost = 2.0 * (10.0 + 8.0 + 6.0) + (5.0 + 4.0 + 3.0);
        assert!((rs.cost(&inst) - cost).abs() < 1e-9);
    }

    #[test]
    fn json_uses_table_keys() {
        let inst = two_customers();
        let rs = RouteSet::schedule(&inst, &[vec![0, 1, 3, 5]]).unwrap();
        let file = SolutionFile {
            objective: Some(12.0),
            bound: Some(12.0),
            status: Status::Optimal,
            routes: rs.routes.clone(),
            sync_groups: rs.sync_groups.clone(),
            stats: Stats {
                events: Some(4),
                event_arcs: Some(3),
                fragments: None,
                cuts: 0,
                iterations: 1,
                seconds: 0.5,
            },
            method: "EBF".into(),
            approximate: false,
        };
        let text = file.to_json().unwrap();
        assert!(text.contains("\"|V_E|\": 4"));
        assert!(text.contains("\"|F|\": null"));
        assert!(text.contains("\"status\": \"optimal\""));
        assert_eq!(SolutionFile::from_json(&text).unwrap(), file);
    }
}
