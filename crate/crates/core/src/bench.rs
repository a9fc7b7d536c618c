//! Method × instance benchmark runs and their CSV / JSON rows.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::formulations::{solve, Formulation, SolveConfig, SolveReport};
use crate::instance::{DatasetParams, Instance};
use crate::milp::Status;

/// One benchmark row. `None` cells are written as empty CSV fields.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    #[serde(rename = "R_L")]
    pub large_fraction: Option<f64>,
    #[serde(rename = "P_TW")]
    pub pickup_window: Option<f64>,
    #[serde(rename = "P_De")]
    pub ride_factor: Option<f64>,
    pub fleet_multiplier: Option<usize>,
    pub method: String,
    pub status: Status,
    #[serde(rename = "|V_E|")]
    pub events: Option<usize>,
    #[serde(rename = "|A_E|")]
    pub event_arcs: Option<usize>,
    #[serde(rename = "|F|")]
    pub fragments: Option<usize>,
    #[serde(rename = "Time")]
    pub seconds: f64,
    #[serde(rename = "OBJ")]
    pub objective: Option<f64>,
    #[serde(rename = "LB")]
    pub bound: Option<f64>,
    #[serde(rename = "Gap")]
    pub gap: Option<f64>,
    #[serde(rename = "Iter")]
    pub iterations: Option<usize>,
    #[serde(rename = "NC")]
    pub cuts: Option<usize>,
    pub approximate: bool,
}

/// A benchmark input: the instance and, when it came from a dataset, its
/// parameters.
#[derive(Clone, Debug)]
pub struct BenchCase {
    pub instance: Instance,
    pub params: Option<DatasetParams>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl BenchRow {
    pub fn from_report(case: &BenchCase, cfg: &SolveConfig, rep: &SolveReport) -> Self {
        let has = rep.status.has_solution();
        let ts = matches!(cfg.formulation, Formulation::Tsef | Formulation::Tsfrag);
        BenchRow {
            instance: case.instance.name.clone(),
            large_fraction: case.params.map(|p| p.large_fraction),
            pickup_window: case.params.map(|p| p.pickup_window),
            ride_factor: case.params.map(|p| p.ride_factor),
            fleet_multiplier: case.params.map(|p| p.fleet_multiplier),
            method: rep.method.clone(),
            status: rep.status,
            events: rep.stats.events,
            event_arcs: rep.stats.event_arcs,
            fragments: rep.stats.fragments,
            seconds: rep.stats.seconds,
            objective: if has { finite(rep.objective) } else { None },
            bound: finite(rep.bound),
            gap: if has { rep.gap() } else { None },
            iterations: cfg.ddd.then_some(rep.stats.iterations),
            cuts: ts.then_some(rep.stats.cuts),
            approximate: rep.approximate,
        }
    }
}

/// Solves every (case, method) pair; rows come out in input order whatever
/// the thread count. A failed solve is logged and recorded as a time-limit
/// row with empty cells.
pub fn run_bench(
    cases: &[BenchCase],
    methods: &[SolveConfig],
    parallel: usize,
) -> Result<Vec<BenchRow>> {
    let jobs: Vec<(usize, usize)> = (0..cases.len())
        .flat_map(|c| (0..methods.len()).map(move |m| (c, m)))
        .collect();
    let run = |&(c, m): &(usize, usize)| -> BenchRow {
        let (case, cfg) = (&cases[c], &methods[m]);
        match solve(&case.instance, cfg) {
            Ok(rep) => BenchRow::from_report(case, cfg, &rep),
            Err(e) => {
                log::error!("{} / {}: {e}", case.instance.name, cfg.method());
                let mut rep = failed_report(cfg);
                rep.method = cfg.method();
                BenchRow::from_report(case, cfg, &rep)
            }
        }
    };
    if parallel <= 1 {
        return Ok(jobs.iter().map(run).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel)
        .build()
        .map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(run).collect()))
}

fn failed_report(cfg: &SolveConfig) -> SolveReport {
    SolveReport {
        method: cfg.method(),
        status: Status::TimeLimit,
        objective: f64::INFINITY,
        bound: f64::NEG_INFINITY,
        routes: Default::default(),
        stats: Default::default(),
        approximate: false,
        scheduled: false,
        history: Vec::new(),
    }
}

/// CSV with a header row, also when `rows` is empty.
pub fn write_csv<W: Write>(out: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Column names, in the field order of `BenchRow`.
pub const CSV_HEADER: [&str; 17] = [
    "instance",
    "R_L",
    "P_TW",
    "P_De",
    "fleet_multiplier",
    "method",
    "status",
    "|V_E|",
    "|A_E|",
    "|F|",
    "Time",
    "OBJ",
    "LB",
    "Gap",
    "Iter",
    "NC",
    "approximate",
];

fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Io(std::io::Error::other(e))
}

/// One JSON object per line.
pub fn write_json_lines<W: Write>(mut out: W, rows: &[BenchRow]) -> Result<()> {
    for r in rows {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_instance, RandomParams};

    #[test]
    fn empty_list_gives_header_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("instance,R_L,P_TW,P_De,fleet_multiplier,method,status,|V_E|"));
    }

    #[test]
    fn rows_are_deterministic_and_na_is_empty() {
        let cases: Vec<BenchCase> = (0..3)
            .map(|s| BenchCase {
                instance: random_instance(s, &RandomParams::default()),
                params: None,
            })
            .collect();
        let methods = vec![
            SolveConfig::new(Formulation::Ebf),
            SolveConfig::new(Formulation::Tsfrag).with_ddd(),
        ];
        let a = run_bench(&cases, &methods, 1).unwrap();
        let b = run_bench(&cases, &methods, 2).unwrap();
        let objs = |rows: &[BenchRow]| {
            rows.iter()
                .map(|r| (r.instance.clone(), r.method.clone(), r.objective))
                .collect::<Vec<_>>()
        };
        assert_eq!(objs(&a), objs(&b));
        assert_eq!(a.len(), 6);
        assert!(a[0].iterations.is_none() && a[1].iterations.is_some());
        let mut buf = Vec::new();
        write_csv(&mut buf, &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().nth(1).unwrap();
        assert!(first.contains(",,,,"), "{first}");
        let header = text.lines().next().unwrap().split(',').count();
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == header));
    }
}
