//! Builds both datasets from a synthetic benchmark-shaped instance and
//! compares the exact methods on it.
//!
//! cargo run --release --example synthetic_benchmark -- [seed] [vehicles] [n] [a|b]

use darpsv::events::enumerate_events;
use darpsv::formulations::{solve, Formulation, SolveConfig};
use darpsv::fragments::enumerate_fragments;
use darpsv::gen::benchmark_text;
use darpsv::instance::{build_dataset, parse_cordeau, DatasetParams};
use darpsv::validate::check;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed: u64 = args.first().map_or(Ok(1), |s| s.parse())?;
    let vehicles: usize = args.get(1).map_or(Ok(2), |s| s.parse())?;
    let n: usize = args.get(2).map_or(Ok(16), |s| s.parse())?;
    let type_b = args.get(3).is_some_and(|s| s == "b");
    let raw = parse_cordeau("synthetic", &benchmark_text(seed, vehicles, n, type_b))?;
    for (label, params) in [
        ("dataset 1", DatasetParams::set1()),
        ("dataset 2", DatasetParams::set2(1.0 / 3.0, 15.0, 1.5)),
        ("DARP", DatasetParams::darp(1.5)),
    ] {
        let inst = match build_dataset(&raw, &params) {
            Ok(i) => i,
            Err(e) => {
                println!("{label}: {e}");
                continue;
            }
        };
        let ev = enumerate_events(&inst);
        println!(
            "{label}: |V|={} large={} |F|={} |V_E|={} |A_E|={}",
            inst.fleet,
            inst.large_customers().len(),
            enumerate_fragments(&inst).len(),
            ev.num_events(),
            ev.num_arcs()
        );
        let mut methods = vec![
            SolveConfig::new(Formulation::Tsfrag).with_ddd(),
            SolveConfig::new(Formulation::Ebf),
            SolveConfig::new(Formulation::Abf),
        ];
        if inst.large_customers().is_empty() {
            methods.push(SolveConfig::new(Formulation::Tsfrag).with_callbacks());
        }
        for cfg in methods {
            let rep = solve(&inst, &cfg.with_time_limit(300.0))?;
            println!(
                "  {:<18} {:<17} obj={:>9.3} lb={:>9.3} iter={:<3} nc={:<3} {:.2}s violations={}",
                rep.method,
                rep.status.to_string(),
                rep.objective,
                rep.bound,
                rep.stats.iterations,
                rep.stats.cuts,
                rep.stats.seconds,
                check(&inst, &rep.routes).len()
            );
        }
    }
    Ok(())
}
