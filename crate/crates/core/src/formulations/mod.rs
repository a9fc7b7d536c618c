//! The four MILP formulations, route extraction and the solve entry point.

pub mod abf;
pub mod cuts;
pub mod ebf;
pub mod flow;
pub mod ts;
pub mod tsef;
pub mod tsfrag;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use self::abf::{build_abf, AbfModel};
pub use self::ebf::{build_ebf, EbfModel};
pub use self::flow::{decompose, Decomposition, FlowArc};
pub use self::ts::TsModel;
pub use self::tsef::build_tsef;
pub use self::tsfrag::build_tsfrag;
use crate::ddd::{self, DddRecord};
use crate::error::{Error, Result};
use crate::events::{enumerate_events, EventNetwork};
use crate::fragments::{enumerate_fragments, FragmentSet};
use crate::instance::{Instance, Loc};
use crate::milp::{
    self, resolve_with_cuts, BackendKind, MilpBackend, MilpSolution, SolveOptions, Status,
};
use crate::solution::{opt_finite, RouteSet, SolutionFile, Stats};
use crate::timespace::{expand_events, expand_fragments, TimeGrid, TimeSpaceNetwork};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Formulation {
    Abf,
    Ebf,
    Tsef,
    Tsfrag,
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "abf" => Ok(Formulation::Abf),
            "ebf" => Ok(Formulation::Ebf),
            "tsef" => Ok(Formulation::Tsef),
            "tsfrag" => Ok(Formulation::Tsfrag),
            other => Err(Error::Config(format!("unknown formulation `{other}`"))),
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Abf => "ABF",
            Formulation::Ebf => "EBF",
            Formulation::Tsef => "TSEF",
            Formulation::Tsfrag => "TSFrag",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub formulation: Formulation,
    pub ddd: bool,
    /// Grid step in minutes for time-space runs without DDD.
    pub resolution: Option<f64>,
    /// TSFrag with infeasible-path cuts on a fixed grid.
    pub callbacks: bool,
    pub time_limit: f64,
    pub backend: BackendKind,
    pub milp: SolveOptions,
}

impl SolveConfig {
    pub fn new(formulation: Formulation) -> Self {
        SolveConfig {
            formulation,
            ddd: false,
            resolution: None,
            callbacks: false,
            time_limit: 1800.0,
            backend: BackendKind::default(),
            milp: SolveOptions::default(),
        }
    }

    pub fn with_ddd(mut self) -> Self {
        self.ddd = true;
        self
    }

    pub fn with_callbacks(mut self) -> Self {
        self.callbacks = true;
        self
    }

    pub fn with_resolution(mut self, minutes: f64) -> Self {
        self.resolution = Some(minutes);
        self
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = seconds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ts = matches!(self.formulation, Formulation::Tsef | Formulation::Tsfrag);
        if self.ddd && !ts {
            return Err(Error::Config(format!(
                "--ddd needs a time-space formulation, not {}",
                self.formulation
            )));
        }
        if self.callbacks && self.formulation != Formulation::Tsfrag {
            return Err(Error::Config(
                "--callbacks is only defined for tsfrag".into(),
            ));
        }
        if self.callbacks && self.ddd {
            return Err(Error::Config(
                "--callbacks and --ddd are alternatives".into(),
            ));
        }
        if self.resolution.is_some() && !ts {
            return Err(Error::Config(
                "--resolution applies to time-space formulations only".into(),
            ));
        }
        if let Some(r) = self.resolution {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Config(format!(
                    "resolution must be positive, got {r}"
                )));
            }
        }
        if self.time_limit.is_nan() || self.time_limit <= 0.0 {
            return Err(Error::Config("time limit must be positive".into()));
        }
        Ok(())
    }

    /// Parses a method spec `<formulation>[+ddd|+c][@<minutes>]`, such as
    /// `tsfrag+ddd`, `tsfrag+c@1` or `tsef@10`.
    pub fn parse_method(spec: &str) -> Result<Self> {
        let spec = spec.trim().to_ascii_lowercase();
        let (head, res) = match spec.split_once('@') {
            Some((h, r)) => {
                let r: f64 = r
                    .parse()
                    .map_err(|_| Error::Config(format!("bad resolution in method `{spec}`")))?;
                (h.to_string(), Some(r))
            }
            None => (spec.clone(), None),
        };
        let (form, suffix) = match head.split_once('+') {
            Some((f, s)) => (f, Some(s)),
            None => (head.as_str(), None),
        };
        let mut cfg = SolveConfig::new(form.parse()?);
        match suffix {
            None => {}
            Some("ddd") => cfg.ddd = true,
            Some("c") => cfg.callbacks = true,
            Some(other) => return Err(Error::Config(format!("unknown method suffix `+{other}`"))),
        }
        cfg.resolution = res;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Column label in reports, e.g. `TSFrag+DDD` or `TSEF (1 min)`.
    pub fn method(&self) -> String {
        let res = self.resolution.unwrap_or(1.0);
        match (self.formulation, self.ddd, self.callbacks) {
            (f, true, _) => format!("{f}+DDD"),
            (f, _, true) => format!("{f} ({res} min)+C"),
            (f @ (Formulation::Tsef | Formulation::Tsfrag), _, _) => format!("{f} ({res} min)"),
            (f, _, _) => f.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub method: String,
    pub status: Status,
    pub objective: f64,
    pub bound: f64,
    pub routes: RouteSet,
    pub stats: Stats,
    /// The objective is that of a discretized problem, or the method is
    /// known to be inexact in continuous time.
    pub approximate: bool,
    /// Whether `routes` carry a continuous schedule accepted by the oracle.
    pub scheduled: bool,
    pub history: Vec<DddRecord>,
}

impl SolveReport {
    pub fn gap(&self) -> Option<f64> {
        if self.objective.is_finite() && self.bound.is_finite() && self.objective.abs() > 1e-9 {
            Some(((self.objective - self.bound) / self.objective).max(0.0))
        } else {
            None
        }
    }

    pub fn to_file(&self) -> SolutionFile {
        SolutionFile {
            objective: opt_finite(self.objective),
            bound: opt_finite(self.bound),
            status: self.status,
            routes: self.routes.routes.clone(),
            sync_groups: self.routes.sync_groups.clone(),
            stats: self.stats.clone(),
            method: self.method.clone(),
            approximate: self.approximate,
        }
    }
}

/// Routes with the joint earliest schedule, or unscheduled times when the
/// oracle rejects them.
pub(crate) fn schedule_or_not(inst: &Instance, paths: &[Vec<Loc>]) -> (RouteSet, bool) {
    match RouteSet::schedule(inst, paths) {
        Some(rs) => (rs, true),
        None => (RouteSet::unscheduled(inst, paths), false),
    }
}

pub(crate) fn report_from(
    method: String,
    sol: &MilpSolution,
    routes: RouteSet,
    scheduled: bool,
    stats: Stats,
    approximate: bool,
) -> SolveReport {
    let has = sol.status.has_solution();
    SolveReport {
        method,
        status: sol.status,
        objective: if has { sol.objective } else { f64::INFINITY },
        bound: sol.best_bound,
        routes,
        stats,
        approximate,
        scheduled,
        history: Vec::new(),
    }
}

pub fn solve(inst: &Instance, cfg: &SolveConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let backend = cfg.backend.backend();
    let opts = cfg.milp.clone().with_time_limit(cfg.time_limit);
    let start = Instant::now();
    let mut report = match (cfg.formulation, cfg.ddd) {
        (Formulation::Abf, _) => solve_abf(inst, backend.as_ref(), &opts)?,
        (Formulation::Ebf, _) => solve_ebf(inst, &enumerate_events(inst), backend.as_ref(), &opts)?,
        (Formulation::Tsfrag, true) => {
            ddd::solve_tsfrag(inst, &enumerate_fragments(inst), backend.as_ref(), &opts)?
        }
        (Formulation::Tsef, true) => {
            ddd::solve_tsef(inst, &enumerate_events(inst), backend.as_ref(), &opts)?
        }
        (Formulation::Tsfrag, false) => {
            let frags = enumerate_fragments(inst);
            let grid = TimeGrid::fixed(inst, cfg.resolution.unwrap_or(1.0));
            solve_tsfrag_fixed(inst, &frags, &grid, cfg.callbacks, backend.as_ref(), &opts)?
        }
        (Formulation::Tsef, false) => {
            let events = enumerate_events(inst);
            let grid = TimeGrid::fixed(inst, cfg.resolution.unwrap_or(1.0));
            solve_tsef_fixed(inst, &events, &grid, backend.as_ref(), &opts)?
        }
    };
    report.method = cfg.method();
    report.stats.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// The MILP `cfg` would solve first: the full model for ABF and EBF, the
/// fixed-grid model for time-space formulations, or the initial master for
/// DDD. Cuts are added during solving and are not part of it.
pub fn build_model(inst: &Instance, cfg: &SolveConfig) -> Result<milp::MilpModel> {
    cfg.validate()?;
    let grid = if cfg.ddd {
        TimeGrid::initial(inst)
    } else {
        TimeGrid::fixed(inst, cfg.resolution.unwrap_or(1.0))
    };
    Ok(match cfg.formulation {
        Formulation::Abf => build_abf(inst).model,
        Formulation::Ebf => build_ebf(inst, &enumerate_events(inst)).model,
        Formulation::Tsfrag => {
            let frags = enumerate_fragments(inst);
            build_tsfrag(inst, &frags, &expand_fragments(inst, &frags, &grid)).model
        }
        Formulation::Tsef => {
            let events = enumerate_events(inst);
            build_tsef(inst, &events, &expand_events(inst, &events, &grid)).model
        }
    })
}

pub fn solve_abf(
    inst: &Instance,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let m = build_abf(inst);
    let sol = milp::solve(&m.model, backend, opts)?;
    let (routes, scheduled) = if sol.status.has_solution() {
        schedule_or_not(inst, &m.routes(inst, &sol))
    } else {
        (RouteSet::default(), false)
    };
    let stats = Stats {
        iterations: 1,
        ..Stats::default()
    };
    Ok(report_from(
        "ABF".into(),
        &sol,
        routes,
        scheduled,
        stats,
        false,
    ))
}

pub fn solve_ebf(
    inst: &Instance,
    events: &EventNetwork,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let m = build_ebf(inst, events);
    let sol = milp::solve(&m.model, backend, opts)?;
    let (routes, scheduled) = if sol.status.has_solution() {
        let dec = m.decompose(events, &sol);
        let paths: Vec<Vec<Loc>> = dec
            .paths
            .iter()
            .map(|p| {
                std::iter::once(inst.origin())
                    .chain(p.iter().map(|&k| events.arcs[k].j))
                    .collect()
            })
            .collect();
        schedule_or_not(inst, &paths)
    } else {
        (RouteSet::default(), false)
    };
    let stats = Stats {
        events: Some(events.num_events()),
        event_arcs: Some(events.num_arcs()),
        iterations: 1,
        ..Stats::default()
    };
    Ok(report_from(
        "EBF".into(),
        &sol,
        routes,
        scheduled,
        stats,
        false,
    ))
}

/// Solves a time-space model with subtour cuts (and infeasible-path cuts
/// when `callbacks`), returning the final solution, its decomposition and
/// the cut sets added.
#[allow(clippy::too_many_arguments)]
pub(crate) fn solve_ts_with_cuts(
    inst: &Instance,
    net: &TimeSpaceNetwork,
    frags: Option<&FragmentSet>,
    events: Option<&EventNetwork>,
    m: &mut TsModel,
    callbacks: bool,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<(MilpSolution, Decomposition, Vec<cuts::CutSet>)> {
    let mut added: Vec<cuts::CutSet> = Vec::new();
    let snapshot = m.clone();
    let (sol, _log) = resolve_with_cuts(&mut m.model, backend, opts, |model, sol| {
        let dec = snapshot.decompose(net, sol);
        let mut sets = cuts::subtour_cuts(net, &dec);
        if callbacks && sets.is_empty() {
            sets = cuts::infeasible_path_cuts(inst, net, frags, events, &dec);
        }
        sets.into_iter()
            .enumerate()
            .map(|(k, s)| {
                let c = snapshot.element_cut(format!("cut_{}_{k}", model.num_constraints()), &s);
                added.push(s);
                c
            })
            .collect()
    })?;
    let dec = if sol.status.has_solution() {
        m.decompose(net, &sol)
    } else {
        Decomposition::default()
    };
    Ok((sol, dec, added))
}

pub fn solve_tsfrag_fixed(
    inst: &Instance,
    frags: &FragmentSet,
    grid: &TimeGrid,
    callbacks: bool,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let net = expand_fragments(inst, frags, grid);
    let mut m = build_tsfrag(inst, frags, &net);
    let (sol, dec, added) = solve_ts_with_cuts(
        inst,
        &net,
        Some(frags),
        None,
        &mut m,
        callbacks,
        backend,
        opts,
    )?;
    let paths: Vec<Vec<Loc>> = dec
        .paths
        .iter()
        .map(|p| ts::path_locations(inst, &net, Some(frags), None, p))
        .collect();
    let (routes, scheduled) = if sol.status.has_solution() {
        schedule_or_not(inst, &paths)
    } else {
        (RouteSet::default(), false)
    };
    let stats = Stats {
        fragments: Some(frags.len()),
        cuts: added.len(),
        iterations: 1,
        ..Stats::default()
    };
    // with callbacks the incumbent is continuous-feasible, so the value is exact
    let approximate = !callbacks;
    Ok(report_from(
        String::new(),
        &sol,
        routes,
        scheduled,
        stats,
        approximate,
    ))
}

pub fn solve_tsef_fixed(
    inst: &Instance,
    events: &EventNetwork,
    grid: &TimeGrid,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let net = expand_events(inst, events, grid);
    let mut m = build_tsef(inst, events, &net);
    let (sol, dec, added) =
        solve_ts_with_cuts(inst, &net, None, Some(events), &mut m, false, backend, opts)?;
    let paths: Vec<Vec<Loc>> = dec
        .paths
        .iter()
        .map(|p| ts::path_locations(inst, &net, None, Some(events), p))
        .collect();
    let (routes, scheduled) = if sol.status.has_solution() {
        schedule_or_not(inst, &paths)
    } else {
        (RouteSet::default(), false)
    };
    let stats = Stats {
        events: Some(events.num_events()),
        event_arcs: Some(events.num_arcs()),
        cuts: added.len(),
        iterations: 1,
        ..Stats::default()
    };
    Ok(report_from(
        String::new(),
        &sol,
        routes,
        scheduled,
        stats,
        true,
    ))
}
