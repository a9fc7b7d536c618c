//! Benchmarks a few methods on generated instances and writes CSV to stdout.
//!
//! cargo run --example bench

use darpsv::bench::{run_bench, write_csv, BenchCase};
use darpsv::formulations::SolveConfig;
use darpsv::gen::{random_instance, RandomParams};

fn main() -> anyhow::Result<()> {
    let cases: Vec<BenchCase> = (0..4)
        .map(|s| BenchCase {
            instance: random_instance(
                s,
                &RandomParams {
                    n: 4,
                    ..RandomParams::default()
                },
            ),
            params: None,
        })
        .collect();
    let methods = ["ebf", "abf", "tsfrag+ddd", "tsef+ddd"]
        .iter()
        .map(|m| SolveConfig::parse_method(m))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = run_bench(&cases, &methods, 2)?;
    write_csv(std::io::stdout().lock(), &rows)?;
    Ok(())
}
