//! Runs TSFrag+DDD and prints one line per master solve:
//! `k, bound, Z, new_points, master_seconds`.
//!
//! cargo run --example ddd_trace -- [seed]

use darpsv::formulations::{solve, Formulation, SolveConfig};
use darpsv::gen::benchmark_text;
use darpsv::instance::{build_dataset, parse_cordeau, DatasetParams};

fn main() -> anyhow::Result<()> {
    let seed = std::env::args().nth(1).map_or(Ok(2), |s| s.parse())?;
    let raw = parse_cordeau("synthetic", &benchmark_text(seed, 4, 16, false))?;
    let inst = build_dataset(&raw, &DatasetParams::set2(1.0 / 3.0, 15.0, 1.5))?;
    let rep = solve(&inst, &SolveConfig::new(Formulation::Tsfrag).with_ddd())?;
    for r in &rep.history {
        println!("{}", r.trace_line());
    }
    println!(
        "{} {:.3} after {} iterations",
        rep.status, rep.objective, rep.stats.iterations
    );
    Ok(())
}
