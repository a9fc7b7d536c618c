//! Solves one instance with every formulation and mode.
//!
//! cargo run --example formulations -- [seed]

use darpsv::formulations::SolveConfig;
use darpsv::gen::{random_instance, RandomParams};

fn main() -> anyhow::Result<()> {
    let seed = std::env::args().nth(1).map_or(Ok(3), |s| s.parse())?;
    let inst = random_instance(
        seed,
        &RandomParams {
            n: 4,
            ..RandomParams::default()
        },
    );
    for spec in [
        "abf",
        "ebf",
        "tsef@10",
        "tsef+ddd",
        "tsfrag@10",
        "tsfrag+c@1",
        "tsfrag+ddd",
    ] {
        let cfg = SolveConfig::parse_method(spec)?;
        let rep = darpsv::formulations::solve(&inst, &cfg)?;
        println!(
            "{:<18} {:<10} obj={:>9.3} cuts={} {}",
            rep.method,
            rep.status.to_string(),
            rep.objective,
            rep.stats.cuts,
            if rep.approximate { "approximate" } else { "" }
        );
    }
    Ok(())
}
