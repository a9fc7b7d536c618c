//! Checks a solution, then breaks it and shows the violations found.
//!
//! cargo run --example validate

use darpsv::gen::{random_instance, RandomParams};
use darpsv::validate::{brute_optimum, check};

fn main() -> anyhow::Result<()> {
    let params = RandomParams {
        n: 3,
        large_prob: 0.5,
        ..RandomParams::default()
    };
    let inst = (0..)
        .map(|s| random_instance(s, &params))
        .find(|i| !i.large_customers().is_empty() && brute_optimum(i).ok().flatten().is_some())
        .unwrap();
    let (cost, rs) = brute_optimum(&inst)?.unwrap();
    println!(
        "{}: optimum {cost:.3}, {} violation(s)",
        inst.name,
        check(&inst, &rs).len()
    );
    let mut broken = rs.clone();
    let p = inst.large_customers()[0];
    for r in &mut broken.routes {
        if let Some(s) = r.stops.iter_mut().find(|s| s.loc == p) {
            s.t += 1.0;
            break;
        }
    }
    broken.routes.pop();
    for v in check(&inst, &broken) {
        println!("  {v}");
    }
    Ok(())
}
