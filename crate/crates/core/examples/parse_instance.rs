//! Parses a benchmark-format file (or a generated one), tightens its
//! windows and builds the dataset variants.
//!
//! cargo run --example parse_instance -- [path]

use darpsv::gen::benchmark_text;
use darpsv::instance::{build_dataset, parse_cordeau, tighten_windows, DatasetParams};

fn main() -> anyhow::Result<()> {
    let (name, text) = match std::env::args().nth(1) {
        Some(p) => (p.clone(), std::fs::read_to_string(&p)?),
        None => ("generated".to_string(), benchmark_text(1, 3, 6, false)),
    };
    let raw = parse_cordeau(&name, &text)?;
    println!(
        "{}: n={} Q={} |V|={}",
        raw.name, raw.n, raw.capacity, raw.fleet
    );
    let tight = tighten_windows(&raw)?;
    for i in 1..=raw.n {
        println!(
            "  customer {i}: pickup [{:.1}, {:.1}] -> [{:.1}, {:.1}]",
            raw.early(i),
            raw.late(i),
            tight.early(i),
            tight.late(i)
        );
    }
    for params in [
        DatasetParams::set1(),
        DatasetParams::set2(1.0 / 3.0, 15.0, 1.5),
        DatasetParams::pdptw(1.5),
    ] {
        match build_dataset(&raw, &params) {
            Ok(inst) => println!(
                "{}: {} large, |V|={}",
                inst.name,
                inst.large_customers().len(),
                inst.fleet
            ),
            Err(e) => println!("{}: {e}", params.variant),
        }
    }
    Ok(())
}
