use std::collections::BTreeMap;
use std::time::Instant;

use highs::{HighsModelStatus, HighsSolutionStatus, RowProblem, Sense};

use super::{MilpBackend, MilpModel, MilpSolution, SolveOptions, Status, VarKind};
use crate::error::{Error, Result};
use crate::milp::model::Cmp;

/// HiGHS through its C API.
#[derive(Clone, Copy, Debug, Default)]
pub struct HighsBackend;

fn clamp_inf(x: f64) -> f64 {
    if x >= 1e20 {
        f64::INFINITY
    } else if x <= -1e20 {
        f64::NEG_INFINITY
    } else {
        x
    }
}

impl MilpBackend for HighsBackend {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> Result<MilpSolution> {
        let start = Instant::now();
        let mut pb = RowProblem::default();
        let cols: Vec<_> = model
            .vars
            .iter()
            .map(|v| {
                let int = v.kind != VarKind::Continuous;
                pb.add_column_with_integrality(v.obj, clamp_inf(v.lb)..=clamp_inf(v.ub), int)
            })
            .collect();
        for c in &model.constraints {
            // HiGHS rejects repeated columns within a row
            let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
            for &(v, a) in &c.terms {
                *merged.entry(v.0).or_default() += a;
            }
            let terms: Vec<_> = merged.into_iter().map(|(v, a)| (cols[v], a)).collect();
            match c.cmp {
                Cmp::Le => pb.add_row(..=c.rhs, &terms),
                Cmp::Ge => pb.add_row(c.rhs.., &terms),
                Cmp::Eq => pb.add_row(c.rhs..=c.rhs, &terms),
            }
        }
        let mut hm = pb
            .try_optimise(Sense::Minimise)
            .map_err(|e| Error::Solver(format!("HiGHS rejected the model: {e:?}")))?;
        hm.make_quiet();
        let limit = opts.time_limit.max(0.01);
        let settings = [
            hm.try_set_option("time_limit", limit).is_ok(),
            hm.try_set_option("mip_abs_gap", opts.abs_gap).is_ok(),
            hm.try_set_option("mip_rel_gap", opts.rel_gap).is_ok(),
            hm.try_set_option("random_seed", opts.seed as i32).is_ok(),
        ];
        if settings.iter().any(|ok| !ok) {
            return Err(Error::Config("HiGHS rejected a solver option".into()));
        }
        if opts.threads > 0 {
            let _ = hm.try_set_option("threads", opts.threads as i32);
        }
        let solved = hm
            .try_solve()
            .map_err(|s| Error::Solver(format!("HiGHS run failed: {s:?}")))?;
        let seconds = start.elapsed().as_secs_f64();
        let status = solved.status();
        let has_primal = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
        let mip = model.is_mip();
        let dual_bound = |obj: f64| {
            if mip {
                solved
                    .double_info_value(c"mip_dual_bound")
                    .ok()
                    .filter(|b| b.is_finite())
                    .map_or(obj, |b| b.min(obj))
            } else {
                obj
            }
        };
        let sol = match status {
            HighsModelStatus::Optimal => {
                let values = solved.get_solution().columns().to_vec();
                let objective = model.objective_value(&values);
                MilpSolution {
                    status: Status::Optimal,
                    best_bound: dual_bound(objective),
                    objective,
                    values,
                    seconds,
                }
            }
            HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => {
                MilpSolution::infeasible(seconds)
            }
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ReachedMemoryLimit
            | HighsModelStatus::Unknown => {
                let bound = solved
                    .double_info_value(c"mip_dual_bound")
                    .ok()
                    .filter(|b| b.is_finite())
                    .unwrap_or(f64::NEG_INFINITY);
                if has_primal {
                    let values = solved.get_solution().columns().to_vec();
                    let objective = model.objective_value(&values);
                    MilpSolution {
                        status: Status::FeasibleWithGap,
                        best_bound: bound.min(objective),
                        objective,
                        values,
                        seconds,
                    }
                } else {
                    MilpSolution {
                        status: Status::TimeLimit,
                        best_bound: bound,
                        objective: f64::INFINITY,
                        values: Vec::new(),
                        seconds,
                    }
                }
            }
            other => return Err(Error::Solver(format!("HiGHS returned {other:?}"))),
        };
        Ok(sol)
    }
}
