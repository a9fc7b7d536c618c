//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Benchmark files are read from `$DARP_DATA_DIR` (default
//! `<workspace>/data/cordeau`), named `a2-16`, `a2-16.txt`, `a2-16.json`, ...
//!
//! cargo test --release --test acceptance -- --nocapture

use std::path::{Path, PathBuf};
use std::time::Instant;

use darpsv::events::enumerate_events;
use darpsv::fixtures::{ride_rounding, subtour_rounding};
use darpsv::formulations::{solve, Formulation, SolveConfig, SolveReport};
use darpsv::fragments::enumerate_fragments;
use darpsv::gen::{random_instance, RandomParams};
use darpsv::instance::{build_dataset, load_instance, DatasetParams, Instance};
use darpsv::milp::Status;
use darpsv::schedule::feasible_schedule;
use darpsv::validate::{brute_optimum, check};

const OBJ_TOL: f64 = 0.5;
const SIZE_TOL: f64 = 0.20;
const ORACLE_TOL: f64 = 1e-4;
const ORACLE_COUNT: u64 = 500;
const ORACLE_SECONDS: f64 = 600.0;
const TIME_LIMIT: f64 = 1800.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data_dir() -> PathBuf {
    std::env::var_os("DARP_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/cordeau"))
}

fn find_instance(name: &str) -> Result<Instance, String> {
    let dir = data_dir();
    for ext in ["", ".txt", ".json", ".dat"] {
        let path = dir.join(format!("{name}{ext}"));
        if path.is_file() {
            return load_instance(&path).map_err(|e| format!("{}: {e}", path.display()));
        }
    }
    Err(format!("data missing: no `{name}` in {}", dir.display()))
}

fn all_instances() -> Result<Vec<Instance>, String> {
    let dir = data_dir();
    let entries = std::fs::read_dir(&dir)
        .map_err(|_| format!("data missing: {} not readable", dir.display()))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let out: Vec<Instance> = paths.iter().filter_map(|p| load_instance(p).ok()).collect();
    if out.is_empty() {
        return Err(format!("data missing: no instances in {}", dir.display()));
    }
    Ok(out)
}

fn run(inst: &Instance, cfg: SolveConfig) -> Result<SolveReport, String> {
    let label = cfg.method();
    solve(inst, &cfg.with_time_limit(TIME_LIMIT)).map_err(|e| format!("{} {label}: {e}", inst.name))
}

fn methods() -> Vec<SolveConfig> {
    vec![
        SolveConfig::new(Formulation::Ebf),
        SolveConfig::new(Formulation::Abf),
        SolveConfig::new(Formulation::Tsfrag).with_ddd(),
    ]
}

fn criterion_1() -> Outcome {
    let targets = [
        ("a2-16", 456.99),
        ("a3-18", 460.08),
        ("b2-16", 383.79),
        ("b3-18", 413.00),
    ];
    let mut notes = Vec::new();
    for (name, want) in targets {
        let inst = build_dataset(&find_instance(name)?, &DatasetParams::set1())
            .map_err(|e| e.to_string())?;
        for cfg in methods() {
            let rep = run(&inst, cfg)?;
            if rep.status != Status::Optimal || (rep.objective - want).abs() > OBJ_TOL {
                return Err(format!(
                    "{name} {}: {} {:.2}, want {want}",
                    rep.method, rep.status, rep.objective
                ));
            }
            notes.push(format!("{name} {} {:.2}", rep.method, rep.objective));
        }
    }
    Ok(notes.join("; "))
}

fn criterion_2() -> Outcome {
    let raw = find_instance("a4-16")?;
    let mut notes = Vec::new();
    for (ride, want) in [(1.5, 416.65), (2.0, 405.49)] {
        let inst = build_dataset(&raw, &DatasetParams::set2(1.0 / 3.0, 15.0, ride))
            .map_err(|e| e.to_string())?;
        let rep = run(&inst, SolveConfig::new(Formulation::Tsfrag).with_ddd())?;
        if rep.status != Status::Optimal || (rep.objective - want).abs() > OBJ_TOL {
            return Err(format!(
                "P_De={ride}: {} {:.2}, want {want}",
                rep.status, rep.objective
            ));
        }
        notes.push(format!("P_De={ride} {:.2}", rep.objective));
    }
    Ok(notes.join("; "))
}

fn criterion_3() -> Outcome {
    let inst = build_dataset(&find_instance("a2-16")?, &DatasetParams::set1())
        .map_err(|e| e.to_string())?;
    let f = enumerate_fragments(&inst).len();
    let ev = enumerate_events(&inst);
    let (v, a) = (ev.num_events(), ev.num_arcs());
    let within = |got: usize, want: f64| (got as f64 - want).abs() <= SIZE_TOL * want;
    let msg = format!("|F|={f} (24), |V_E|={v} (46), |A_E|={a} (182)");
    if f == 24 && within(v, 46.0) && within(a, 182.0) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (mut feasible, mut large) = (0, 0);
    for seed in 0..ORACLE_COUNT {
        let params = RandomParams {
            n: 1 + (seed % 4) as usize,
            fleet: 2 + (seed % 2) as usize,
            ..RandomParams::default()
        };
        let inst = random_instance(seed, &params);
        let oracle = brute_optimum(&inst).map_err(|e| e.to_string())?;
        if let Some((_, rs)) = &oracle {
            if !check(&inst, rs).is_empty() {
                return Err(format!(
                    "seed {seed}: oracle solution rejected by the validator"
                ));
            }
            feasible += 1;
            large += !inst.large_customers().is_empty() as usize;
        }
        for cfg in methods() {
            let rep = solve(&inst, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
            match &oracle {
                None if rep.status == Status::Infeasible => {}
                None => {
                    return Err(format!(
                        "seed {seed} {}: {} but oracle infeasible",
                        rep.method, rep.status
                    ))
                }
                Some((obj, _)) => {
                    if rep.status != Status::Optimal || (rep.objective - obj).abs() > ORACLE_TOL {
                        return Err(format!(
                            "seed {seed} {}: {:.6} vs oracle {obj:.6}",
                            rep.method, rep.objective
                        ));
                    }
                    let v = check(&inst, &rep.routes);
                    if !v.is_empty() {
                        return Err(format!(
                            "seed {seed} {}: {} violation(s), first {}",
                            rep.method,
                            v.len(),
                            v[0]
                        ));
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let msg = format!("{ORACLE_COUNT} instances ({feasible} feasible, {large} with large customers) in {secs:.1}s");
    if secs < ORACLE_SECONDS {
        Ok(msg)
    } else {
        Err(format!("{msg}: over {ORACLE_SECONDS}s"))
    }
}

fn criterion_5() -> Outcome {
    let params = DatasetParams::set2(1.0 / 3.0, 15.0, 1.5);
    let mut solved = 0;
    for raw in all_instances()? {
        let Ok(inst) = build_dataset(&raw, &params) else {
            continue;
        };
        let ddd = run(&inst, SolveConfig::new(Formulation::Tsfrag).with_ddd())?;
        if ddd.status != Status::Optimal {
            continue;
        }
        solved += 1;
        for w in ddd.history.windows(2) {
            if w[1].bound < w[0].bound - 1e-6 {
                return Err(format!(
                    "{}: bound fell at iteration {}",
                    inst.name, w[1].iteration
                ));
            }
        }
        if ddd.history.last().and_then(|r| r.z) != Some(0) {
            return Err(format!("{}: terminated without Z = 0", inst.name));
        }
        let ebf = run(&inst, SolveConfig::new(Formulation::Ebf))?;
        if ebf.status == Status::Optimal && (ebf.objective - ddd.objective).abs() > ORACLE_TOL {
            return Err(format!(
                "{}: TSFrag+DDD {:.4} vs EBF {:.4}",
                inst.name, ddd.objective, ebf.objective
            ));
        }
    }
    if solved == 0 {
        return Err("no dataset-2 instance solved".into());
    }
    Ok(format!("{solved} instance(s) solved"))
}

fn criterion_6() -> Outcome {
    let inst = ride_rounding();
    let s = feasible_schedule(&inst, &[1, 2, 3, 4], None).ok_or("oracle rejects the route")?;
    if s.times != [600.0, 624.0, 626.0, 650.0] {
        return Err(format!("oracle times {:?}", s.times));
    }
    let tsef = run(
        &inst,
        SolveConfig::new(Formulation::Tsef).with_resolution(10.0),
    )?;
    if tsef.status != Status::Infeasible {
        return Err(format!("TSEF (10 min) is {}", tsef.status));
    }
    let tsef_ddd = run(&inst, SolveConfig::new(Formulation::Tsef).with_ddd())?;
    if !tsef_ddd.approximate {
        return Err("TSEF+DDD not labelled approximate".into());
    }
    let exact = run(&inst, SolveConfig::new(Formulation::Tsfrag).with_ddd())?;
    Ok(format!(
        "continuous times 600/624/626/650; TSEF (10 min) infeasible; TSEF+DDD {} (approximate); TSFrag+DDD {:.2}",
        tsef_ddd.status, exact.objective
    ))
}

fn criterion_7() -> Outcome {
    let inst = subtour_rounding();
    let ten = run(
        &inst,
        SolveConfig::new(Formulation::Tsfrag).with_resolution(10.0),
    )?;
    let five = run(
        &inst,
        SolveConfig::new(Formulation::Tsfrag).with_resolution(5.0),
    )?;
    let msg = format!(
        "cuts at 10 min = {}, at 5 min = {}",
        ten.stats.cuts, five.stats.cuts
    );
    if ten.stats.cuts == 1 && five.stats.cuts == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8() -> Outcome {
    let params = DatasetParams::darp(1.5);
    let (mut compared, mut with_cuts) = (0, 0);
    for raw in all_instances()? {
        let Ok(inst) = build_dataset(&raw, &params) else {
            continue;
        };
        let c = run(
            &inst,
            SolveConfig::new(Formulation::Tsfrag)
                .with_callbacks()
                .with_resolution(1.0),
        )?;
        let d = run(&inst, SolveConfig::new(Formulation::Tsfrag).with_ddd())?;
        if c.status != Status::Optimal || d.status != Status::Optimal {
            continue;
        }
        compared += 1;
        with_cuts += (c.stats.cuts > 0) as usize;
        if (c.objective - d.objective).abs() > ORACLE_TOL {
            return Err(format!(
                "{}: TSFrag+C {:.4} vs TSFrag+DDD {:.4}",
                inst.name, c.objective, d.objective
            ));
        }
    }
    let msg = format!("{compared} instance(s) agree, NC > 0 on {with_cuts}");
    if compared > 0 && with_cuts > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 8] = [
        ("optimum reproduction, dataset 1", criterion_1),
        ("optimum reproduction, dataset 2", criterion_2),
        ("network-size sanity", criterion_3),
        ("oracle equivalence", criterion_4),
        ("DDD behavior", criterion_5),
        ("discretization regression", criterion_6),
        ("subtour rounding regression", criterion_7),
        ("TSFrag+C parity", criterion_8),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(msg) => println!("[PASS] {}. {name}: {msg} ({secs:.1}s)", k + 1),
            Err(msg) => {
                println!("[FAIL] {}. {name}: {msg} ({secs:.1}s)", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
