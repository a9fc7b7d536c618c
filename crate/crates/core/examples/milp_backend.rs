//! Builds a small MILP, prints it in LP format and solves it with HiGHS.
//!
//! cargo run --example milp_backend

use darpsv::milp::{self, BackendKind, Cmp, MilpModel, SolveOptions};

fn main() -> anyhow::Result<()> {
    let mut m = MilpModel::new();
    let x = m.integer("x", 0.0, 10.0, -3.0);
    let y = m.integer("y", 0.0, 10.0, -2.0);
    m.constrain("a", vec![(x, 2.0), (y, 1.0)], Cmp::Le, 11.0);
    m.constrain("b", vec![(x, 1.0), (y, 3.0)], Cmp::Le, 12.0);
    print!("{}", m.to_lp());
    let backend = BackendKind::resolve(None)?.backend();
    let sol = milp::solve(&m, backend.as_ref(), &SolveOptions::default())?;
    println!(
        "{} via {}: x={} y={} obj={}",
        sol.status,
        backend.name(),
        sol.int(x),
        sol.int(y),
        sol.objective
    );
    Ok(())
}
