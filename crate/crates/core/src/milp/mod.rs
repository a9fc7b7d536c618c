//! Solver-agnostic MILP models and the backend contract.

mod highs;
pub mod model;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use self::highs::HighsBackend;
pub use self::model::{Cmp, Constraint, MilpModel, VarId, VarKind, Variable};
use crate::error::{Error, Result};

/// Environment variable that overrides the backend chosen on the command line.
pub const BACKEND_ENV: &str = "DARPSV_BACKEND";

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    FeasibleWithGap,
    Infeasible,
    TimeLimit,
}

impl Status {
    pub fn has_solution(self) -> bool {
        matches!(self, Status::Optimal | Status::FeasibleWithGap)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Optimal => "optimal",
            Status::FeasibleWithGap => "feasible_with_gap",
            Status::Infeasible => "infeasible",
            Status::TimeLimit => "time_limit",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct MilpSolution {
    pub status: Status,
    pub values: Vec<f64>,
    pub objective: f64,
    pub best_bound: f64,
    pub seconds: f64,
}

impl MilpSolution {
    pub fn infeasible(seconds: f64) -> Self {
        MilpSolution {
            status: Status::Infeasible,
            values: Vec::new(),
            objective: f64::INFINITY,
            best_bound: f64::INFINITY,
            seconds,
        }
    }

    pub fn value(&self, v: VarId) -> f64 {
        self.values[v.0]
    }

    /// Value rounded to the nearest integer, for integer and binary variables.
    pub fn int(&self, v: VarId) -> i64 {
        self.values[v.0].round() as i64
    }

    pub fn gap(&self) -> Option<f64> {
        if self.objective.is_finite() && self.best_bound.is_finite() && self.objective.abs() > 1e-9
        {
            Some((self.objective - self.best_bound) / self.objective)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Wall-clock limit in seconds.
    pub time_limit: f64,
    /// Zero leaves the choice to the backend.
    pub threads: usize,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            time_limit: 1800.0,
            threads: 1,
            abs_gap: 1e-6,
            rel_gap: 1e-9,
            seed: 0,
        }
    }
}

impl SolveOptions {
    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = seconds;
        self
    }
}

pub trait MilpBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> Result<MilpSolution>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BackendKind {
    #[default]
    Highs,
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "highs" => Ok(BackendKind::Highs),
            other => Err(Error::Config(format!(
                "unknown MILP backend `{other}` (available: highs)"
            ))),
        }
    }
}

impl BackendKind {
    /// The backend named by the environment override, else `requested`.
    pub fn resolve(requested: Option<&str>) -> Result<Self> {
        match std::env::var(BACKEND_ENV) {
            Ok(name) if !name.trim().is_empty() => name.trim().parse(),
            _ => requested.map_or(Ok(BackendKind::default()), str::parse),
        }
    }

    pub fn backend(self) -> Box<dyn MilpBackend> {
        match self {
            BackendKind::Highs => Box::new(HighsBackend),
        }
    }
}

/// Solves `model`, handling the degenerate empty model without a backend call.
pub fn solve(
    model: &MilpModel,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
) -> Result<MilpSolution> {
    if model.num_vars() == 0 {
        let ok = model.constraints.iter().all(|c| c.violation(&[]) <= 1e-9);
        return Ok(if ok {
            MilpSolution {
                status: Status::Optimal,
                values: Vec::new(),
                objective: 0.0,
                best_bound: 0.0,
                seconds: 0.0,
            }
        } else {
            MilpSolution::infeasible(0.0)
        });
    }
    let sol = backend.solve(model, opts)?;
    log::debug!(
        "{} solve: {} vars, {} rows -> {} obj {:.4} bound {:.4} in {:.2}s",
        backend.name(),
        model.num_vars(),
        model.num_constraints(),
        sol.status,
        sol.objective,
        sol.best_bound,
        sol.seconds
    );
    Ok(sol)
}

#[derive(Clone, Debug, Default)]
pub struct CutLog {
    /// Total number of rows added.
    pub cuts: usize,
    /// Number of solves performed.
    pub solves: usize,
    /// Best bound after each solve.
    pub bounds: Vec<f64>,
}

/// Solve, ask `separate` for violated rows, add them and re-solve until none
/// are returned or the time budget runs out.
pub fn resolve_with_cuts<F>(
    model: &mut MilpModel,
    backend: &dyn MilpBackend,
    opts: &SolveOptions,
    mut separate: F,
) -> Result<(MilpSolution, CutLog)>
where
    F: FnMut(&MilpModel, &MilpSolution) -> Vec<Constraint>,
{
    let start = Instant::now();
    let mut log = CutLog::default();
    loop {
        let remaining = opts.time_limit - start.elapsed().as_secs_f64();
        let sol = solve(
            model,
            backend,
            &opts.clone().with_time_limit(remaining.max(0.01)),
        )?;
        log.solves += 1;
        if let Some(&prev) = log.bounds.last() {
            if sol.best_bound.is_finite() && sol.best_bound < prev - 1e-6 * prev.abs().max(1.0) {
                log::warn!(
                    "best bound decreased after cuts: {prev} -> {}",
                    sol.best_bound
                );
            }
        }
        log.bounds.push(sol.best_bound);
        if !sol.status.has_solution() {
            return Ok((sol, log));
        }
        let cuts = separate(model, &sol);
        if cuts.is_empty() {
            return Ok((sol, log));
        }
        if start.elapsed().as_secs_f64() >= opts.time_limit {
            let mut sol = sol;
            sol.status = Status::FeasibleWithGap;
            return Ok((sol, log));
        }
        log.cuts += cuts.len();
        for c in cuts {
            model.add_constraint(c);
        }
    }
}
