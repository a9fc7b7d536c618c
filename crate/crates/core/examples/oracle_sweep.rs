//! Cross-checks ABF, EBF and TSFrag+DDD against exhaustive search on seeded
//! random instances.
//!
//! cargo run --example oracle_sweep -- 200

use std::time::Instant;

use darpsv::formulations::{solve, Formulation, SolveConfig};
use darpsv::gen::{random_instance, RandomParams};
use darpsv::validate::{brute_optimum, check};

fn main() -> anyhow::Result<()> {
    let count: u64 = std::env::args().nth(1).map_or(Ok(100), |s| s.parse())?;
    let start = Instant::now();
    let (mut feasible, mut large, mut mismatches) = (0, 0, 0);
    for seed in 0..count {
        let params = RandomParams {
            n: 1 + (seed % 4) as usize,
            fleet: 2 + (seed % 2) as usize,
            ..RandomParams::default()
        };
        let inst = random_instance(seed, &params);
        let oracle = brute_optimum(&inst)?.map(|(obj, _)| obj);
        feasible += oracle.is_some() as usize;
        large += (oracle.is_some() && !inst.large_customers().is_empty()) as usize;
        for f in [Formulation::Abf, Formulation::Ebf, Formulation::Tsfrag] {
            let cfg = if f == Formulation::Tsfrag {
                SolveConfig::new(f).with_ddd()
            } else {
                SolveConfig::new(f)
            };
            let rep = solve(&inst, &cfg)?;
            let got = rep.objective.is_finite().then_some(rep.objective);
            let agree = match (got, oracle) {
                (Some(a), Some(b)) => (a - b).abs() < 1e-4 && check(&inst, &rep.routes).is_empty(),
                (None, None) => true,
                _ => false,
            };
            if !agree {
                mismatches += 1;
                println!("seed {seed} {}: {got:?} vs oracle {oracle:?}", rep.method);
            }
        }
    }
    println!(
        "{count} instances, {feasible} feasible ({large} with large customers), {mismatches} mismatches, {:.1}s",
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
